#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unimark/alternation.hpp"
#include "unimark/scheme.hpp"
#include "unimark/utf8.hpp"

namespace unimark::harness {

struct Document {
  std::string id;
  Text text;
};

struct LoadWarning {
  std::string id;
  std::string message;
};

struct Corpus {
  std::vector<Document> documents;
  std::string source;
  std::vector<LoadWarning> warnings;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class CorpusFormat { txt_dir, jsonl };

inline std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Loads documents byte-faithfully. Documents that are not valid UTF-8 are
/// skipped and listed in Corpus::warnings.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("corpus path '" + path.string() + "' does not exist");
  Corpus corpus;
  corpus.source = path.string();
  if (format == CorpusFormat::txt_dir) {
    if (!fs::is_directory(path)) throw IoError("'" + path.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string id = f.stem().string();
      try {
        corpus.documents.push_back({id, decode_utf8(read_file_bytes(f))});
      } catch (const Utf8Error& e) {
        corpus.warnings.push_back({id, e.what()});
      }
    }
    return corpus;
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    std::string bytes;
    try {
      const auto j = nlohmann::json::parse(line);
      id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      bytes = j.at("text").get<std::string>();
    } catch (const std::exception& e) {
      throw FormatError(e.what(), lineno);
    }
    if (!seen.insert(id).second) throw FormatError("duplicate document id '" + id + "'", lineno);
    try {
      corpus.documents.push_back({id, decode_utf8(bytes)});
    } catch (const Utf8Error& e) {
      corpus.warnings.push_back({id, e.what()});
    }
  }
  return corpus;
}

/// The watermark is a relabeling among visually equivalent codepoints: undo
/// it, compare, and confirm every changed scalar stayed inside its class.
inline bool quality_invariance_check(std::u32string_view original, const Scheme& scheme) {
  const Text marked = apply_scheme(original, scheme);
  if (strip_scheme(marked, scheme) != original) return false;

  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) {
    if (marked.size() != original.size()) return false;
    for (std::size_t i = 0; i < original.size(); ++i) {
      if (marked[i] == original[i]) continue;
      if (original[i] != w->base || marked[i] != w->mark) return false;
      if (!is_registry_whitespace(original[i]) || !is_registry_whitespace(marked[i])) return false;
    }
    return true;
  }

  const auto& a = std::get<AlternationScheme>(scheme);
  std::size_t i = 0, j = 0;
  while (i < original.size() || j < marked.size()) {
    if (i < original.size() && j < marked.size() && original[i] == marked[j]) {
      ++i, ++j;
      continue;
    }
    if (j >= marked.size()) return false;
    switch (a.eligibility) {
      case Eligibility::whitespace:
        if (i >= original.size() || original[i] != a.base || marked[j] != a.mark) return false;
        if (!is_registry_whitespace(a.base) || !is_registry_whitespace(a.mark)) return false;
        ++i, ++j;
        break;
      case Eligibility::cjk_variant: {
        // inserted selector must preserve the glyph of the base before it
        if (j == 0 || i == 0 || original[i - 1] != marked[j - 1]) return false;
        const auto preserving = a.registry->preserving_selector(marked[j - 1]);
        if (!preserving || *preserving != marked[j]) return false;
        ++j;
        break;
      }
      case Eligibility::ligature: {
        const auto plain = decompose_ligature(marked[j]);
        if (!plain || original.substr(i, plain->size()) != *plain) return false;
        i += plain->size();
        ++j;
        break;
      }
    }
  }
  return true;
}

enum class Split { paired, halves };

inline std::string_view to_string(Split s) { return s == Split::paired ? "paired" : "halves"; }

struct EvalOptions {
  std::uint64_t seed = 0;
  Split split = Split::paired;
};

struct EvalReport {
  std::string scheme;
  std::size_t n_docs = 0;
  std::size_t n_marked = 0;
  std::size_t n_unmarked = 0;
  double fnr = 0.0;
  double fpr = 0.0;
  double delta_fp_hat = 0.0;
  double delta_fn_hat = 0.0;
  double invariance_pass = 0.0;
  std::vector<std::string> false_negative_ids;
  std::vector<std::string> false_positive_ids;
  std::vector<std::string> premarked_ids;  // docs that already carried the mark before apply
  std::uint64_t seed = 0;
  std::string split = "paired";

  bool operator==(const EvalReport&) const = default;
};

/// Detection rates over a corpus.
///
/// paired: every document is watermarked (FNR population) and every original
/// is tested (FPR population). halves: a seeded shuffle splits the corpus
/// 50/50 into marked and unmarked groups. In both cases delta_fn_hat is
/// measured on the FNR population and delta_fp_hat on the FPR population.
inline EvalReport evaluate(const Scheme& scheme, const Corpus& corpus, const EvalOptions& opt = {}) {
  if (corpus.documents.empty()) throw std::invalid_argument("cannot evaluate an empty corpus");
  EvalReport r;
  r.scheme = describe(scheme);
  r.n_docs = corpus.documents.size();
  r.seed = opt.seed;
  r.split = std::string(to_string(opt.split));

  std::vector<std::size_t> marked_idx(r.n_docs), unmarked_idx;
  std::iota(marked_idx.begin(), marked_idx.end(), 0);
  if (opt.split == Split::paired) {
    unmarked_idx = marked_idx;
  } else {
    std::mt19937_64 rng(opt.seed);
    std::shuffle(marked_idx.begin(), marked_idx.end(), rng);
    const std::size_t half = (r.n_docs + 1) / 2;
    unmarked_idx.assign(marked_idx.begin() + static_cast<std::ptrdiff_t>(half), marked_idx.end());
    marked_idx.resize(half);
    std::sort(marked_idx.begin(), marked_idx.end());
    std::sort(unmarked_idx.begin(), unmarked_idx.end());
  }
  r.n_marked = marked_idx.size();
  r.n_unmarked = unmarked_idx.size();

  std::size_t fn = 0, no_capacity = 0;
  for (auto i : marked_idx) {
    const auto& doc = corpus.documents[i];
    if (contains_marked_form(doc.text, scheme)) r.premarked_ids.push_back(doc.id);
    if (!has_capacity(doc.text, scheme)) ++no_capacity;
    if (!is_detected(apply_scheme(doc.text, scheme), scheme)) {
      ++fn;
      r.false_negative_ids.push_back(doc.id);
    }
  }
  std::size_t fp = 0, premarked = 0;
  for (auto i : unmarked_idx) {
    const auto& doc = corpus.documents[i];
    if (contains_marked_form(doc.text, scheme)) ++premarked;
    if (is_detected(doc.text, scheme)) {
      ++fp;
      r.false_positive_ids.push_back(doc.id);
    }
  }
  std::size_t invariant = 0;
  for (const auto& doc : corpus.documents) {
    if (quality_invariance_check(doc.text, scheme)) ++invariant;
  }
  auto frac = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  r.fnr = frac(fn, r.n_marked);
  r.fpr = frac(fp, r.n_unmarked);
  r.delta_fn_hat = frac(no_capacity, r.n_marked);
  r.delta_fp_hat = frac(premarked, r.n_unmarked);
  r.invariance_pass = frac(invariant, r.n_docs);
  std::sort(r.premarked_ids.begin(), r.premarked_ids.end());
  r.premarked_ids.erase(std::unique(r.premarked_ids.begin(), r.premarked_ids.end()), r.premarked_ids.end());
  return r;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["scheme"] = r.scheme;
  j["n_docs"] = r.n_docs;
  j["n_marked"] = r.n_marked;
  j["n_unmarked"] = r.n_unmarked;
  j["fnr"] = r.fnr;
  j["fpr"] = r.fpr;
  j["delta_fp_hat"] = r.delta_fp_hat;
  j["delta_fn_hat"] = r.delta_fn_hat;
  j["invariance_pass"] = r.invariance_pass;
  j["false_negative_ids"] = r.false_negative_ids;
  j["false_positive_ids"] = r.false_positive_ids;
  j["premarked_ids"] = r.premarked_ids;
  j["seed"] = r.seed;
  j["split"] = r.split;
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.scheme = j.at("scheme").get<std::string>();
  r.n_docs = j.at("n_docs").get<std::size_t>();
  r.n_marked = j.at("n_marked").get<std::size_t>();
  r.n_unmarked = j.at("n_unmarked").get<std::size_t>();
  r.fnr = j.at("fnr").get<double>();
  r.fpr = j.at("fpr").get<double>();
  r.delta_fp_hat = j.at("delta_fp_hat").get<double>();
  r.delta_fn_hat = j.at("delta_fn_hat").get<double>();
  r.invariance_pass = j.at("invariance_pass").get<double>();
  r.false_negative_ids = j.at("false_negative_ids").get<std::vector<std::string>>();
  r.false_positive_ids = j.at("false_positive_ids").get<std::vector<std::string>>();
  r.premarked_ids = j.at("premarked_ids").get<std::vector<std::string>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.split = j.at("split").get<std::string>();
  return r;
}

inline std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v * 100.0 << " %";
  return os.str();
}

enum class ReportFormat { json, markdown };

inline std::string emit_report(const EvalReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  os << "| Method | BLEU | FNR | FPR |\n";
  os << "|---|---|---|---|\n";
  os << "| " << r.scheme << " | n/a (not measured) | " << percent(r.fnr) << " | " << percent(r.fpr) << " |\n";
  os << "\n";
  os << "documents: " << r.n_docs << " (marked " << r.n_marked << ", unmarked " << r.n_unmarked << ", split "
     << r.split << ")  \n";
  os << "delta_FN estimate: " << percent(r.delta_fn_hat) << ", delta_FP estimate: " << percent(r.delta_fp_hat)
     << ", invariance pass: " << percent(r.invariance_pass) << "\n";
  return os.str();
}

}  // namespace unimark::harness
