// Copyright 2026 The restyler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line surface. Verbs are thin wrappers over the library; data
// goes to stdout or files, progress to stderr. Exit codes: 0 success,
// 1 config/usage error, 2 completed with recorded failures.

#include <chrono>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "restyler/digest.hpp"
#include "restyler/error.hpp"
#include "restyler/matcher.hpp"
#include "restyler/metrics.hpp"
#include "restyler/phash.hpp"
#include "restyler/pipeline.hpp"
#include "restyler/restyle.hpp"

namespace {

using namespace restyler;

int cmd_hash(const std::string& input, const std::string& out,
             int workers) {
  const Manifest m = ingest(input, SampleRole::kSource);
  std::vector<HashEntry> entries(m.samples.size());
  const auto n = static_cast<std::int64_t>(m.samples.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    entries[i] = {m.samples[i].id,
                  compute_hash(decode_file(m.samples[i].path))};
  }
  write_hash_file(out, entries);
  std::fprintf(stderr, "[hash] %zu images -> %s\n", entries.size(),
               out.c_str());
  return 0;
}

int cmd_match(const std::string& source_hashes,
              const std::string& style_hashes, const std::string& mode,
              int k, std::uint64_t seed, const std::string& out,
              int workers) {
  const auto queries = read_hash_file(source_hashes);
  const HashIndex index = build_index(read_hash_file(style_hashes));
  const MatchMode m = match_mode_from_name(mode);
  const auto sets = match_corpus(index, queries, m, k, seed, workers);
  const auto records = to_match_records(queries, sets, m);
  write_match_file(out, records);
  std::fprintf(stderr, "[match] %zu pairs -> %s\n", records.size(),
               out.c_str());
  return 0;
}

int cmd_restyle(const std::string& content_path,
                const std::string& style_path, const RestyleConfig& cfg,
                const std::string& out) {
  const ImageBuffer content = decode_file(content_path);
  const ImageBuffer style = decode_file(style_path);
  write_image_file(out, restyle(content, style, cfg));
  std::fprintf(stderr, "[restyle] %s + %s -> %s\n", content_path.c_str(),
               style_path.c_str(), out.c_str());
  return 0;
}

// Minimal key=value reader for `run --config`. Lines are `key = value`,
// `#`/`;` start comments, keys mirror the long flag names. Flags given on
// the command line take precedence over file values; unknown keys are hard
// errors. (CLI11's own config support does not reach subcommand options,
// so the file is applied by hand after parsing.)
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(Errc::kIoError, "cannot read config file: " + path);
  }
  std::map<std::string, std::string> kv;
  const auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::kParseError, "config line " + std::to_string(lineno) +
                                  ": expected key=value, got: " + trim(line));
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

long long config_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  fail(Errc::kParseError, "config key " + key + ": not an integer: " + v);
}

double config_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(Errc::kParseError, "config key " + key + ": not a number: " + v);
}

bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(Errc::kParseError, "config key " + key + ": not a boolean: " + v);
}

int cmd_run(const PipelineConfig& cfg) {
  const PipelineResult r = run_pipeline(cfg);
  std::fprintf(stderr,
               "[run] sources=%zu styles=%zu restyled=%zu failures=%zu\n",
               r.num_sources, r.num_styles, r.num_restyled,
               r.num_failures);
  std::printf("%s\n", r.manifest_path.string().c_str());
  return r.num_failures == 0 ? 0 : 2;
}

int cmd_stats(const std::string& manifest_path,
              const std::vector<std::string>& subsets, int workers) {
  const Manifest m = read_manifest(manifest_path);
  std::vector<CorpusStats> all;
  for (const std::string& subset : subsets) {
    const SampleRole role = role_from_name(subset);
    std::vector<std::string> paths;
    for (const SampleRecord& s : m.samples) {
      if (s.role == role) paths.push_back(s.path);
    }
    const CorpusStats stats = corpus_stats(
        paths.size(),
        [&paths](std::size_t i) { return decode_file(paths[i]); },
        workers);
    std::printf("subset=%s images=%zu pixels=%llu\n", subset.c_str(),
                paths.size(),
                static_cast<unsigned long long>(stats.pixel_count));
    std::printf("mean=%.9g,%.9g,%.9g\n", stats.mean[0], stats.mean[1],
                stats.mean[2]);
    for (int r = 0; r < 3; ++r) {
      std::printf("cov%d=%.9g,%.9g,%.9g\n", r, stats.covariance[r * 3],
                  stats.covariance[r * 3 + 1], stats.covariance[r * 3 + 2]);
    }
    all.push_back(stats);
  }
  if (all.size() == 2) {
    std::printf("domain_gap=%.9g\n", domain_gap(all[0], all[1]));
  }
  return 0;
}

int cmd_verify(const std::string& manifest_path) {
  const VerifyReport report = verify_manifest(manifest_path);
  std::printf("checked=%zu issues=%zu\n", report.samples_checked,
              report.issues.size());
  for (const VerifyIssue& issue : report.issues) {
    std::printf("issue\t%s\t%s\n", issue.id.c_str(),
                issue.problem.c_str());
  }
  return report.ok() ? 0 : 2;
}

// Synthetic RGB test card: smooth gradients with per-pixel noise, enough
// texture that hashing does real work.
ImageBuffer bench_image(int side, std::uint64_t seed) {
  ImageBuffer img = make_image(side, side, 3, Colorspace::kRgb);
  for (int c = 0; c < 3; ++c) {
    auto plane = img.plane(c);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const double base = (c == 0   ? x + y
                             : c == 1 ? x - y + side
                                      : 2 * side - x) /
                            (2.0 * side);
        const double noise =
            (mix64(seed + (static_cast<std::uint64_t>(c * side + y) << 20) +
                   x) &
             0xff) /
            2550.0;
        plane[static_cast<std::size_t>(y) * side + x] =
            static_cast<float>(std::clamp(base + noise, 0.0, 1.0));
      }
    }
  }
  return img;
}

int cmd_bench(int hash_count, int scan_size, int workers) {
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  // Hashing throughput, serial reference vs OpenMP.
  std::vector<ImageBuffer> images;
  images.reserve(hash_count);
  for (int i = 0; i < hash_count; ++i) {
    images.push_back(bench_image(512, 1000 + i));
  }
  std::vector<PerceptualHash> serial_hashes(images.size());
  auto t0 = clock::now();
  for (std::size_t i = 0; i < images.size(); ++i) {
    serial_hashes[i] = compute_hash(images[i]);
  }
  const double serial_s = seconds_since(t0);

  std::vector<PerceptualHash> parallel_hashes(images.size());
  const auto n = static_cast<std::int64_t>(images.size());
  t0 = clock::now();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    parallel_hashes[i] = compute_hash(images[i]);
  }
  const double parallel_s = seconds_since(t0);
  const bool identical = serial_hashes == parallel_hashes;

  // Hamming scan throughput: repeated exact 5-NN over a random index.
  std::vector<HashEntry> entries;
  entries.reserve(scan_size);
  for (int i = 0; i < scan_size; ++i) {
    entries.emplace_back("h" + std::to_string(i),
                         PerceptualHash{mix64(77777 + i)});
  }
  const HashIndex index = build_index(entries);
  const int rounds = 32;
  std::size_t sink = 0;
  t0 = clock::now();
  for (int r = 0; r < rounds; ++r) {
    sink += knn(index, PerceptualHash{mix64(r)}, 5).front().index;
  }
  const double scan_s = seconds_since(t0);
  const double comparisons = static_cast<double>(scan_size) * rounds;

  std::printf("hash_serial_images_per_s=%.1f\n", hash_count / serial_s);
  std::printf("hash_parallel_images_per_s=%.1f workers=%d\n",
              hash_count / parallel_s, workers);
  std::printf("hash_parallel_matches_serial=%s\n",
              identical ? "yes" : "NO");
  std::printf("scan_comparisons_per_s=%.3g (sink=%zu)\n",
              comparisons / scan_s, sink);
  std::printf(
      "targets: hash >= 200 images/s at 512x512, scan >= 5e7 cmp/s on an "
      "8-core machine (informational, not enforced)\n");
  return identical ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "restyler: perceptual-hash matching and photometric restyling for "
      "image corpora"};
  app.require_subcommand(1);

  // hash
  std::string hash_input, hash_out;
  int hash_workers = 1;
  auto* hash_cmd =
      app.add_subcommand("hash", "Hash every image under a directory");
  hash_cmd->add_option("--input", hash_input, "image directory")
      ->required();
  hash_cmd->add_option("--out", hash_out, "hash file to write")->required();
  hash_cmd->add_option("--workers", hash_workers, "thread count");

  // match
  std::string m_src, m_sty, m_out, m_mode = "ph";
  int m_k = 5, m_workers = 1;
  std::uint64_t m_seed = 0;
  auto* match_cmd = app.add_subcommand(
      "match", "Select k styles per source from two hash files");
  match_cmd->add_option("--source-hashes", m_src, "source hash file")
      ->required();
  match_cmd->add_option("--style-hashes", m_sty, "style hash file")
      ->required();
  match_cmd->add_option("--mode", m_mode, "ph (nearest) or rs (random)");
  match_cmd->add_option("--k", m_k, "styles per source (default 5)");
  match_cmd->add_option("--seed", m_seed, "rs-mode seed");
  match_cmd->add_option("--out", m_out, "match file to write")->required();
  match_cmd->add_option("--workers", m_workers, "thread count");

  // restyle
  std::string r_content, r_style, r_out, r_backend = "stats";
  RestyleConfig r_cfg;
  auto* restyle_cmd =
      app.add_subcommand("restyle", "Restyle one image with one style");
  restyle_cmd->add_option("--content", r_content, "content image")
      ->required();
  restyle_cmd->add_option("--style", r_style, "style image")->required();
  restyle_cmd->add_option("--backend", r_backend, "stats, hist or freq");
  restyle_cmd->add_option("--lowpass-radius", r_cfg.lowpass_radius,
                          "freq backend blur radius");
  restyle_cmd->add_option("--gain-limit", r_cfg.gain_limit,
                          "max per-channel contrast gain");
  restyle_cmd->add_flag("--detail", r_cfg.detail_preserve,
                        "re-impose content detail");
  restyle_cmd->add_option("--out", r_out, "output image")->required();

  // run
  PipelineConfig p_cfg;
  std::string p_source, p_style, p_out, p_labels;
  std::string p_mode = "ph", p_backend = "stats", p_format = "png";
  bool p_no_metrics = false;
  auto* run_cmd =
      app.add_subcommand("run", "Full pipeline: ingest, hash, match, "
                                "restyle, report");
  std::string p_config;
  run_cmd->add_option("--config", p_config,
                      "key=value config file; flags override it");
  run_cmd->add_option("--source-dir", p_source, "labelled source corpus");
  run_cmd->add_option("--style-dir", p_style, "style corpus");
  run_cmd->add_option("--out-dir", p_out, "output directory");
  run_cmd->add_option("--labels-dir", p_labels,
                      "label maps mirroring source-dir");
  run_cmd->add_option("--mode", p_mode, "ph or rs");
  run_cmd->add_option("--k", p_cfg.k, "styles per source (default 5)");
  run_cmd->add_option("--seed", p_cfg.seed, "rs-mode seed");
  run_cmd->add_option("--backend", p_backend, "stats, hist or freq");
  run_cmd->add_option("--lowpass-radius", p_cfg.backend.lowpass_radius,
                      "freq backend blur radius");
  run_cmd->add_option("--gain-limit", p_cfg.backend.gain_limit,
                      "max per-channel contrast gain");
  run_cmd->add_flag("--detail", p_cfg.backend.detail_preserve,
                    "re-impose content detail");
  run_cmd->add_option("--workers", p_cfg.workers, "thread count");
  run_cmd->add_option("--format", p_format, "png or jpeg outputs");
  run_cmd->add_option("--jpeg-quality", p_cfg.jpeg_quality,
                      "jpeg output quality");
  run_cmd->add_flag("--no-metrics", p_no_metrics,
                    "skip the metrics report");

  // stats
  std::string s_manifest;
  std::vector<std::string> s_subsets;
  int s_workers = 1;
  auto* stats_cmd = app.add_subcommand(
      "stats", "Pooled color statistics of manifest subsets");
  stats_cmd->add_option("--manifest", s_manifest, "manifest file")
      ->required();
  stats_cmd
      ->add_option("--subset", s_subsets,
                   "source, style or restyled (repeatable)")
      ->required();
  stats_cmd->add_option("--workers", s_workers, "thread count");

  // verify
  std::string v_manifest;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Check a manifest's integrity and files");
  verify_cmd->add_option("--manifest", v_manifest, "manifest file")
      ->required();

  // bench
  int b_hash_count = 64, b_scan_size = 1 << 20, b_workers = 1;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Throughput benchmark, serial vs parallel");
  bench_cmd->add_option("--hash-count", b_hash_count,
                        "images to hash per pass");
  bench_cmd->add_option("--scan-size", b_scan_size, "index size for scan");
  bench_cmd->add_option("--workers", b_workers, "parallel thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(hash_cmd)) {
      return cmd_hash(hash_input, hash_out, hash_workers);
    }
    if (app.got_subcommand(match_cmd)) {
      return cmd_match(m_src, m_sty, m_mode, m_k, m_seed, m_out, m_workers);
    }
    if (app.got_subcommand(restyle_cmd)) {
      r_cfg.backend = backend_from_name(r_backend);
      return cmd_restyle(r_content, r_style, r_cfg, r_out);
    }
    if (app.got_subcommand(run_cmd)) {
      if (!p_config.empty()) {
        std::map<std::string, std::string> kv = read_config_file(p_config);
        const auto take = [&](const char* flag, const std::string& key,
                              auto&& set) {
          const auto it = kv.find(key);
          if (it == kv.end()) return;
          if (run_cmd->count(flag) == 0) set(it->second);
          kv.erase(it);
        };
        const auto str = [](std::string& dst) {
          return [&dst](const std::string& v) { dst = v; };
        };
        take("--source-dir", "source-dir", str(p_source));
        take("--style-dir", "style-dir", str(p_style));
        take("--out-dir", "out-dir", str(p_out));
        take("--labels-dir", "labels-dir", str(p_labels));
        take("--mode", "mode", str(p_mode));
        take("--backend", "backend", str(p_backend));
        take("--format", "format", str(p_format));
        take("--k", "k", [&](const std::string& v) {
          p_cfg.k = static_cast<int>(config_int("k", v));
        });
        take("--seed", "seed", [&](const std::string& v) {
          p_cfg.seed = static_cast<std::uint64_t>(config_int("seed", v));
        });
        take("--lowpass-radius", "lowpass-radius",
             [&](const std::string& v) {
               p_cfg.backend.lowpass_radius =
                   static_cast<int>(config_int("lowpass-radius", v));
             });
        take("--gain-limit", "gain-limit", [&](const std::string& v) {
          p_cfg.backend.gain_limit = config_double("gain-limit", v);
        });
        take("--detail", "detail", [&](const std::string& v) {
          p_cfg.backend.detail_preserve = config_bool("detail", v);
        });
        take("--workers", "workers", [&](const std::string& v) {
          p_cfg.workers = static_cast<int>(config_int("workers", v));
        });
        take("--jpeg-quality", "jpeg-quality", [&](const std::string& v) {
          p_cfg.jpeg_quality =
              static_cast<int>(config_int("jpeg-quality", v));
        });
        take("--no-metrics", "no-metrics", [&](const std::string& v) {
          p_no_metrics = config_bool("no-metrics", v);
        });
        if (!kv.empty()) {
          fail(Errc::kConfigError,
               "unknown config key: " + kv.begin()->first);
        }
      }
      p_cfg.source_dir = p_source;
      p_cfg.style_dir = p_style;
      p_cfg.out_dir = p_out;
      p_cfg.labels_dir = p_labels;
      p_cfg.mode = match_mode_from_name(p_mode);
      p_cfg.backend.backend = backend_from_name(p_backend);
      p_cfg.output_format =
          p_format == "jpeg" || p_format == "jpg" ? OutputFormat::kJpeg
                                                  : OutputFormat::kPng;
      if (p_format != "png" && p_format != "jpeg" && p_format != "jpg") {
        fail(Errc::kConfigError, "format must be png or jpeg");
      }
      p_cfg.compute_metrics = !p_no_metrics;
      return cmd_run(p_cfg);
    }
    if (app.got_subcommand(stats_cmd)) {
      return cmd_stats(s_manifest, s_subsets, s_workers);
    }
    if (app.got_subcommand(verify_cmd)) {
      return cmd_verify(v_manifest);
    }
    if (app.got_subcommand(bench_cmd)) {
      return cmd_bench(b_hash_count, b_scan_size, b_workers);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", errc_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
