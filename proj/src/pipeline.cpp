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

#include "restyler/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "restyler/digest.hpp"
#include "restyler/error.hpp"
#include "restyler/metrics.hpp"

namespace restyler {
namespace {

namespace fs = std::filesystem;

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// True when `inner` equals `outer` or lies beneath it.
bool is_within(const fs::path& inner, const fs::path& outer) {
  const fs::path a = fs::weakly_canonical(inner);
  const fs::path b = fs::weakly_canonical(outer);
  auto it = std::mismatch(b.begin(), b.end(), a.begin(), a.end());
  return it.first == b.end();
}

// Incremental FNV digest over tagged fields; the separator keeps
// ("ab","c") distinct from ("a","bc").
struct DigestBuilder {
  std::uint64_t h = kFnvOffset;
  DigestBuilder& add(std::string_view s) {
    h = fnv1a64(s, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
    return *this;
  }
  DigestBuilder& add(std::uint64_t v) { return add(to_hex16(v)); }
  std::string hex() const { return to_hex16(h); }
};

// Resume ledger: `<output key>\t<digest>` per line, sorted by key. An
// output is reused only when its recorded digest matches the wanted one
// and the file still exists.
struct StateFile {
  std::map<std::string, std::string> entries;

  void load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;  // first run
    std::string line;
    while (std::getline(in, line)) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) continue;  // tolerate a damaged ledger
      entries[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  void save(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
    }
    for (const auto& [key, digest] : entries) {
      out << key << '\t' << digest << '\n';
    }
  }

  bool fresh(const std::string& key, const std::string& digest,
             const fs::path& output) const {
    const auto it = entries.find(key);
    return it != entries.end() && it->second == digest &&
           fs::exists(output);
  }
};

std::string sanitize_component(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                    c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string restyle_digest(const PipelineConfig& cfg,
                           const std::string& content_id,
                           const std::string& style_id, int rank) {
  DigestBuilder d;
  d.add("restyle-v1")
      .add(backend_name(cfg.backend.backend))
      .add(cfg.backend.detail_preserve ? "detail" : "plain")
      .add(static_cast<std::uint64_t>(cfg.backend.lowpass_radius))
      .add(std::to_string(cfg.backend.gain_limit))
      .add(cfg.output_format == OutputFormat::kPng ? "png" : "jpeg")
      .add(static_cast<std::uint64_t>(cfg.jpeg_quality))
      .add(content_id)
      .add(style_id)
      .add(static_cast<std::uint64_t>(rank));
  return d.hex();
}

std::string ids_digest(std::string_view tag, const Manifest& m) {
  DigestBuilder d;
  d.add(tag);
  for (const SampleRecord& s : m.samples) d.add(s.id);
  return d.hex();
}

void progress(const char* phase, const std::string& message) {
  std::fprintf(stderr, "[%s] %s\n", phase, message.c_str());
}

// Hash phase over one corpus: parallel decode+hash, deterministic skip
// order, reuse via the state ledger.
struct HashedCorpus {
  std::vector<HashEntry> entries;        // surviving samples, input order
  std::vector<SampleRecord> samples;     // matching manifest rows
  std::vector<SkipRecord> skips;         // decode/hash failures
};

HashedCorpus hash_corpus(const Manifest& ingested, const char* tag,
                         const fs::path& hash_path, StateFile& state,
                         const std::string& digest, int workers) {
  HashedCorpus out;
  const std::string key = hash_path.filename().string();
  if (state.fresh(key, digest, hash_path)) {
    // Trust the ledger: ids in the hash file are a subset of the ingested
    // ids (failures were dropped when it was written).
    std::unordered_map<std::string, PerceptualHash> hashed;
    for (auto& [id, hash] : read_hash_file(hash_path)) {
      hashed.emplace(id, hash);
    }
    for (const SampleRecord& s : ingested.samples) {
      const auto it = hashed.find(s.id);
      if (it != hashed.end()) {
        out.entries.emplace_back(s.id, it->second);
        out.samples.push_back(s);
      } else {
        out.skips.push_back(SkipRecord{s.id, "hash failed on an earlier run"});
      }
    }
    progress(tag, "reused " + hash_path.filename().string());
    return out;
  }

  const auto n = static_cast<std::int64_t>(ingested.samples.size());
  std::vector<PerceptualHash> hashes(ingested.samples.size());
  std::vector<std::string> errors(ingested.samples.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      hashes[i] = compute_hash(decode_file(ingested.samples[i].path));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < ingested.samples.size(); ++i) {
    if (errors[i].empty()) {
      out.entries.emplace_back(ingested.samples[i].id, hashes[i]);
      out.samples.push_back(ingested.samples[i]);
    } else {
      out.skips.push_back(
          SkipRecord{ingested.samples[i].id, "hash failed: " + errors[i]});
    }
  }
  write_hash_file(hash_path, out.entries);
  state.entries[key] = digest;
  progress(tag, std::to_string(out.entries.size()) + " hashed, " +
                    std::to_string(out.skips.size()) + " failed");
  return out;
}

ImageBuffer decode_rgb(const std::string& path) {
  ImageBuffer img = decode_file(path);
  if (img.channels == 1) {
    ImageBuffer rgb = make_image(img.width, img.height, 3, Colorspace::kRgb);
    for (int c = 0; c < 3; ++c) {
      std::copy(img.plane(0).begin(), img.plane(0).end(),
                rgb.plane(c).begin());
    }
    return rgb;
  }
  return img;
}

}  // namespace

Manifest ingest(const fs::path& dir, SampleRole role) {
  if (!fs::exists(dir) || !fs::is_directory(dir)) {
    fail(Errc::kMissingDir, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path().lexically_relative(dir));
    }
  }
  std::vector<std::string> rels;
  rels.reserve(files.size());
  for (const fs::path& p : files) rels.push_back(p.generic_string());
  std::sort(rels.begin(), rels.end());

  Manifest m;
  for (const std::string& rel : rels) {
    if (has_image_extension(rel)) {
      SampleRecord s;
      s.id = rel;
      s.role = role;
      s.path = (dir / rel).generic_string();
      m.samples.push_back(std::move(s));
    } else {
      m.skips.push_back(SkipRecord{rel, "not an image file"});
    }
  }
  return m;
}

void validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.k < 1) {
    problems.push_back("k must be >= 1, got " + std::to_string(cfg.k));
  }
  if (cfg.workers < 1) {
    problems.push_back("workers must be >= 1, got " +
                       std::to_string(cfg.workers));
  }
  if (cfg.backend.lowpass_radius < 1) {
    problems.push_back("lowpass_radius must be >= 1");
  }
  if (cfg.backend.gain_limit < 1.0) {
    problems.push_back("gain_limit must be >= 1");
  }
  if (cfg.jpeg_quality < 1 || cfg.jpeg_quality > 100) {
    problems.push_back("jpeg_quality must be in [1,100]");
  }
  if (cfg.source_dir.empty() || !fs::is_directory(cfg.source_dir)) {
    problems.push_back("source_dir is not a directory: " +
                       cfg.source_dir.string());
  }
  if (cfg.style_dir.empty() || !fs::is_directory(cfg.style_dir)) {
    problems.push_back("style_dir is not a directory: " +
                       cfg.style_dir.string());
  }
  if (cfg.out_dir.empty()) {
    problems.push_back("out_dir is required");
  }
  if (!cfg.labels_dir.empty() && !fs::is_directory(cfg.labels_dir)) {
    problems.push_back("labels_dir is not a directory: " +
                       cfg.labels_dir.string());
  }
  // Outputs must never land inside an input tree (or swallow one).
  if (!cfg.out_dir.empty()) {
    for (const auto& [what, dir] :
         {std::pair<const char*, const fs::path*>{"source_dir",
                                                  &cfg.source_dir},
          {"style_dir", &cfg.style_dir}}) {
      if (dir->empty() || !fs::is_directory(*dir)) continue;
      if (is_within(cfg.out_dir, *dir) || is_within(*dir, cfg.out_dir)) {
        problems.push_back(std::string("out_dir overlaps ") + what);
      }
    }
  }
  if (!problems.empty()) {
    std::string joined;
    for (const std::string& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    fail(Errc::kConfigError, joined);
  }
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  validate_config(cfg);
  fs::create_directories(cfg.out_dir);
  fs::create_directories(cfg.out_dir / "restyled");

  StateFile state;
  const fs::path state_path = cfg.out_dir / "state.tsv";
  state.load(state_path);

  // --- ingest ---
  Manifest src = ingest(cfg.source_dir, SampleRole::kSource);
  Manifest sty = ingest(cfg.style_dir, SampleRole::kStyle);
  if (src.samples.empty()) {
    fail(Errc::kEmptyCorpus,
         "no images under source_dir " + cfg.source_dir.string());
  }
  if (sty.samples.empty()) {
    fail(Errc::kEmptyCorpus,
         "no images under style_dir " + cfg.style_dir.string());
  }
  if (!cfg.labels_dir.empty()) {
    for (SampleRecord& s : src.samples) {
      fs::path candidate = cfg.labels_dir / s.id;
      candidate.replace_extension(".png");
      if (fs::exists(candidate)) {
        s.label_path = candidate.generic_string();
      }
    }
  }
  progress("ingest", std::to_string(src.samples.size()) + " sources, " +
                         std::to_string(sty.samples.size()) + " styles");

  // --- hash ---
  const bool need_hashes =
      cfg.mode == MatchMode::kPh || cfg.compute_metrics;
  HashedCorpus hashed_src, hashed_sty;
  if (need_hashes) {
    hashed_src = hash_corpus(src, "hash",
                             cfg.out_dir / "source_hashes.tsv", state,
                             ids_digest("hash-v1:source", src),
                             cfg.workers);
    hashed_sty = hash_corpus(sty, "hash",
                             cfg.out_dir / "style_hashes.tsv", state,
                             ids_digest("hash-v1:style", sty),
                             cfg.workers);
  } else {
    // Random mode can match on ids alone; decode problems surface later,
    // in the restyle phase.
    for (const SampleRecord& s : src.samples) {
      hashed_src.entries.emplace_back(s.id, PerceptualHash{});
      hashed_src.samples.push_back(s);
    }
    for (const SampleRecord& s : sty.samples) {
      hashed_sty.entries.emplace_back(s.id, PerceptualHash{});
      hashed_sty.samples.push_back(s);
    }
  }
  if (hashed_sty.entries.empty()) {
    fail(Errc::kEmptyCorpus, "every style image failed to hash");
  }

  // --- match ---
  const HashIndex index = build_index(hashed_sty.entries);
  if (index.size() < static_cast<std::size_t>(cfg.k)) {
    progress("match", "style corpus smaller than k; using all " +
                          std::to_string(index.size()) + " styles");
  }
  const fs::path match_path = cfg.out_dir / "matches.tsv";
  DigestBuilder match_digest;
  match_digest.add("match-v1")
      .add(match_mode_name(cfg.mode))
      .add(static_cast<std::uint64_t>(cfg.k))
      .add(cfg.seed)
      .add(ids_digest("hash-v1:source", src))
      .add(ids_digest("hash-v1:style", sty));
  std::vector<MatchRecord> match_records;
  if (state.fresh("matches.tsv", match_digest.hex(), match_path)) {
    match_records = read_match_file(match_path);
    progress("match", "reused matches.tsv");
  } else {
    const auto sets = match_corpus(index, hashed_src.entries, cfg.mode,
                                   cfg.k, cfg.seed, cfg.workers);
    match_records = to_match_records(hashed_src.entries, sets, cfg.mode);
    write_match_file(match_path, match_records);
    state.entries["matches.tsv"] = match_digest.hex();
    progress("match", std::to_string(match_records.size()) + " pairs");
  }

  // Group match rows per source, preserving source order.
  std::unordered_map<std::string, std::vector<const MatchRecord*>>
      per_source;
  for (const MatchRecord& r : match_records) {
    per_source[r.source_id].push_back(&r);
  }

  // --- restyle ---
  const char* out_ext = cfg.output_format == OutputFormat::kPng ? "png"
                                                                : "jpg";
  std::unordered_map<std::string, const SampleRecord*> style_rows;
  for (const SampleRecord& s : hashed_sty.samples) {
    style_rows.emplace(s.id, &s);
  }

  struct RestyleTask {
    const SampleRecord* source;
    const MatchRecord* match;
    std::string id;        // restyled sample id
    fs::path out_path;
    std::string digest;
  };
  std::vector<RestyleTask> tasks;
  for (const SampleRecord& s : hashed_src.samples) {
    const auto it = per_source.find(s.id);
    if (it == per_source.end()) continue;
    for (const MatchRecord* r : it->second) {
      RestyleTask t;
      t.source = &s;
      t.match = r;
      t.id = s.id + "#r" + std::to_string(r->rank);
      fs::path rel(s.id);
      t.out_path = cfg.out_dir / "restyled" /
                   (sanitize_component(rel.stem().string()) + "_" +
                    to_hex16(fnv1a64(t.id)).substr(0, 8) + "_r" +
                    std::to_string(r->rank) + "." + out_ext);
      t.digest = restyle_digest(cfg, s.id, r->style_id, r->rank);
      tasks.push_back(std::move(t));
    }
  }

  enum class TaskOutcome { kDone, kReused, kFailed };
  std::vector<TaskOutcome> outcomes(tasks.size(), TaskOutcome::kDone);
  std::vector<std::string> task_errors(tasks.size());
  const auto task_count = static_cast<std::int64_t>(tasks.size());
  // Tasks touching the same source sit next to each other; dynamic chunks
  // of ~k keep one content decode per thread useful.
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (std::int64_t ti = 0; ti < task_count; ++ti) {
    const RestyleTask& t = tasks[ti];
    const std::string key = "restyled/" + t.out_path.filename().string();
    if (state.fresh(key, t.digest, t.out_path)) {
      outcomes[ti] = TaskOutcome::kReused;
      continue;
    }
    try {
      const auto style_row = style_rows.find(t.match->style_id);
      if (style_row == style_rows.end()) {
        fail(Errc::kUnknownId,
             "match references unknown style '" + t.match->style_id + "'");
      }
      const ImageBuffer content = decode_rgb(t.source->path);
      const ImageBuffer style = decode_rgb(style_row->second->path);
      const ImageBuffer result = restyle(content, style, cfg.backend);
      write_image_file(t.out_path, result, cfg.jpeg_quality);
    } catch (const Error& e) {
      outcomes[ti] = TaskOutcome::kFailed;
      task_errors[ti] = e.what();
    }
  }

  PipelineResult result;
  Manifest& manifest = result.manifest;
  manifest.samples = hashed_src.samples;  // SOURCE rows
  for (const SampleRecord& s : hashed_sty.samples) {
    manifest.samples.push_back(s);  // STYLE rows
  }
  std::size_t produced = 0;
  std::vector<SkipRecord> restyle_skips;
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const RestyleTask& t = tasks[ti];
    if (outcomes[ti] == TaskOutcome::kFailed) {
      restyle_skips.push_back(
          SkipRecord{t.id, "restyle failed: " + task_errors[ti]});
      continue;
    }
    const std::string key = "restyled/" + t.out_path.filename().string();
    state.entries[key] = t.digest;
    if (outcomes[ti] == TaskOutcome::kReused) ++result.num_reused;
    SampleRecord s;
    s.id = t.id;
    s.role = SampleRole::kRestyled;
    s.path = t.out_path.generic_string();
    s.label_path = t.source->label_path;  // labels survive restyling
    s.content_id = t.source->id;
    s.style_id = t.match->style_id;
    s.backend = backend_name(cfg.backend.backend);
    s.rank = t.match->rank;
    manifest.samples.push_back(std::move(s));
    ++produced;
  }
  // Skip records in phase order: ingest, hashing, restyling.
  for (const SkipRecord& s : src.skips) manifest.skips.push_back(s);
  for (const SkipRecord& s : sty.skips) manifest.skips.push_back(s);
  for (const SkipRecord& s : hashed_src.skips) manifest.skips.push_back(s);
  for (const SkipRecord& s : hashed_sty.skips) manifest.skips.push_back(s);
  for (SkipRecord& s : restyle_skips) manifest.skips.push_back(std::move(s));
  progress("restyle", std::to_string(produced) + " written (" +
                          std::to_string(result.num_reused) + " reused)");

  // --- metrics ---
  if (cfg.compute_metrics) {
    std::vector<MetricRecord> rows;

    const auto loader_for = [](std::vector<std::string> paths) {
      return [paths = std::move(paths)](std::size_t i) -> ImageBuffer {
        try {
          return decode_file(paths[i]);
        } catch (const Error&) {
          return ImageBuffer{};  // excluded from pooled stats
        }
      };
    };
    std::vector<std::string> src_paths, sty_paths, re_paths;
    std::vector<const SampleRecord*> re_rows;
    for (const SampleRecord& s : manifest.samples) {
      switch (s.role) {
        case SampleRole::kSource:
          src_paths.push_back(s.path);
          break;
        case SampleRole::kStyle:
          sty_paths.push_back(s.path);
          break;
        case SampleRole::kRestyled:
          re_paths.push_back(s.path);
          re_rows.push_back(&s);
          break;
      }
    }
    const CorpusStats stats_src =
        corpus_stats(src_paths.size(), loader_for(src_paths), cfg.workers);
    const CorpusStats stats_sty =
        corpus_stats(sty_paths.size(), loader_for(sty_paths), cfg.workers);
    rows.push_back(MetricRecord{"domain_gap", "source", "style",
                                domain_gap(stats_src, stats_sty)});
    if (!re_paths.empty()) {
      const CorpusStats stats_re =
          corpus_stats(re_paths.size(), loader_for(re_paths), cfg.workers);
      rows.push_back(MetricRecord{"domain_gap", "restyled", "style",
                                  domain_gap(stats_re, stats_sty)});

      // Structure preservation of each restyled output vs its content.
      std::unordered_map<std::string, const SampleRecord*> src_by_id;
      for (const SampleRecord& s : hashed_src.samples) {
        src_by_id.emplace(s.id, &s);
      }
      std::vector<double> scores(re_rows.size(), 0.0);
      std::vector<char> valid(re_rows.size(), 0);
      const auto m = static_cast<std::int64_t>(re_rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
      for (std::int64_t i = 0; i < m; ++i) {
        try {
          const SampleRecord* content = src_by_id.at(*re_rows[i]->content_id);
          scores[i] = structure_preservation(decode_file(content->path),
                                             decode_file(re_rows[i]->path));
          valid[i] = 1;
        } catch (const std::exception&) {
          valid[i] = 0;
        }
      }
      double sum = 0.0;
      std::size_t n_valid = 0;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (valid[i]) {
          sum += scores[i];
          ++n_valid;
        }
      }
      if (n_valid > 0) {
        rows.push_back(MetricRecord{"structure_preservation", "source",
                                    "restyled",
                                    sum / static_cast<double>(n_valid)});
      }
    }
    if (need_hashes) {
      const MatchQualityReport mq =
          match_quality_report(match_records, hashed_src.entries, index);
      for (const ModeQuality& q : mq.modes) {
        rows.push_back(
            MetricRecord{"match_mean_distance", q.mode, "", q.mean});
        rows.push_back(MetricRecord{"match_p50_distance", q.mode, "",
                                    static_cast<double>(q.p50)});
        rows.push_back(MetricRecord{"match_p90_distance", q.mode, "",
                                    static_cast<double>(q.p90)});
      }
      rows.push_back(
          MetricRecord{"styles_reused", "style", "",
                       static_cast<double>(mq.style_reuse.size())});
    }
    write_metrics_csv(cfg.out_dir / "metrics.csv", rows);
    progress("metrics", std::to_string(rows.size()) + " rows");
  }

  // --- durable records ---
  result.manifest_path = cfg.out_dir / "manifest.tsv";
  write_manifest(result.manifest_path, manifest);
  state.save(state_path);

  result.num_sources = hashed_src.samples.size();
  result.num_styles = hashed_sty.samples.size();
  result.num_restyled = produced;
  result.num_failures = manifest.skips.size();
  return result;
}

VerifyReport verify_manifest(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  VerifyReport report;
  // Ids are unique within a role, not across roles: a source and a style
  // may well share a relative path like img000.png.
  std::unordered_map<std::string, const SampleRecord*> sources, styles;
  std::unordered_set<std::string> restyled_ids;
  const auto add = [&report](const std::string& id,
                             const std::string& problem) {
    report.issues.push_back(VerifyIssue{id, problem});
  };
  for (const SampleRecord& s : m.samples) {
    bool fresh = true;
    switch (s.role) {
      case SampleRole::kSource:
        fresh = sources.emplace(s.id, &s).second;
        break;
      case SampleRole::kStyle:
        fresh = styles.emplace(s.id, &s).second;
        break;
      case SampleRole::kRestyled:
        fresh = restyled_ids.insert(s.id).second;
        break;
    }
    if (!fresh) {
      add(s.id, "duplicate id");
    }
  }
  for (const SampleRecord& s : m.samples) {
    ++report.samples_checked;
    if (!fs::exists(s.path)) {
      add(s.id, "missing file: " + s.path);
    } else {
      try {
        decode_file(s.path);
      } catch (const Error& e) {
        add(s.id, "undecodable file: " + std::string(e.what()));
      }
    }
    if (s.label_path && !fs::exists(*s.label_path)) {
      add(s.id, "missing label: " + *s.label_path);
    }
    if (s.role == SampleRole::kRestyled) {
      if (!s.content_id || !s.style_id || !s.backend || !s.rank) {
        add(s.id, "incomplete provenance");
        continue;
      }
      const auto content = sources.find(*s.content_id);
      if (content == sources.end()) {
        add(s.id, "content_id does not name a source sample: " +
                      *s.content_id);
      } else if (content->second->label_path != s.label_path) {
        add(s.id, "label differs from its content source");
      }
      if (!styles.count(*s.style_id)) {
        add(s.id, "style_id does not name a style sample: " + *s.style_id);
      }
    }
  }
  return report;
}

}  // namespace restyler
