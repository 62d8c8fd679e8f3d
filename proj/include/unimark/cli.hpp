#pragma once

// `unimark` command line. run() takes explicit streams so tests can drive it
// in-process; tools/unimark.cpp wires it to stdin/stdout/stderr.
//
// Exit codes: 0 success (detect: watermark found), 3 detect found nothing,
// 1 usage error, 2 runtime error. Errors go to stderr as one JSON line.

#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "unimark/erasure_sim.hpp"
#include "unimark/harness.hpp"
#include "unimark/scheme.hpp"
#include "unimark/json_views.hpp"
#include "unimark/stego_frontend.hpp"
#include "unimark/utf8.hpp"

namespace unimark::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kRuntime = 2;
inline constexpr int kNotDetected = 3;

namespace detail {

inline void report_error(std::ostream& err, const std::string& code, const std::string& message,
                         const nlohmann::json& extra = nullptr) {
  nlohmann::json j{{"code", code}, {"message", message}};
  if (!extra.is_null()) j["details"] = extra;
  err << j.dump() << '\n';
}

inline std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace detail

struct CliConfig {
  std::string scheme = "whitemark";
  std::string base;
  std::string mark;
  std::string alphabet;
  std::string codec = "none";
  std::string payload;
  std::optional<std::size_t> bits;
  std::optional<std::size_t> min_eligible;
  std::optional<double> min_ratio;
  std::string corpus;
  std::string corpus_format;
  std::string split = "paired";
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string setup;
  std::string mode;
};

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unicode codepoint watermarking and whitespace steganography", "unimark"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_scheme_opts = [&](CLI::App* sub) {
    sub->add_option("--scheme", cfg.scheme, "whitemark | variantmark | printmark-whitespace | printmark-ligature")
        ->check(CLI::IsMember({"whitemark", "variantmark", "printmark-whitespace", "printmark-ligature"}));
    sub->add_option("--base", cfg.base, "base codepoint, U+XXXX");
    sub->add_option("--mark", cfg.mark, "mark codepoint, U+XXXX");
    sub->add_option("--min-eligible", cfg.min_eligible, "alternation: minimum eligible positions");
    sub->add_option("--min-ratio", cfg.min_ratio, "alternation: minimum alternating ratio");
  };

  auto* mark = app.add_subcommand("mark", "watermark stdin, write to stdout");
  add_scheme_opts(mark);
  auto* detect = app.add_subcommand("detect", "print a verdict for stdin; exit 3 when nothing is found");
  add_scheme_opts(detect);
  auto* strip = app.add_subcommand("strip", "remove a watermark from stdin");
  add_scheme_opts(strip);

  auto add_stego_opts = [&](CLI::App* sub) {
    auto* alpha = sub->add_option("--alphabet", cfg.alphabet, "p-ary digit codepoints, U+XXXX,U+XXXX,...");
    auto* mk = sub->add_option("--mark", cfg.mark, "positional profile mark codepoint (default U+2004)");
    alpha->excludes(mk);
    sub->add_option("--codec", cfg.codec, "error correction")
        ->check(CLI::IsMember({"none", "repetition3", "hamming74"}));
  };
  auto* embed = app.add_subcommand("embed", "hide a payload in the whitespace of stdin");
  add_stego_opts(embed);
  embed->add_option("--payload", cfg.payload, "0x-prefixed hex or a 0/1 bit string")->required();
  auto* extract = app.add_subcommand("extract", "recover a payload from stdin");
  add_stego_opts(extract);
  extract->add_option("--bits", cfg.bits, "payload length in bits");

  auto* eval = app.add_subcommand("eval", "FNR/FPR over a corpus");
  add_scheme_opts(eval);
  eval->add_option("--corpus", cfg.corpus, "directory of .txt files or a .jsonl file")->required();
  eval->add_option("--corpus-format", cfg.corpus_format, "txt_dir | jsonl (default: by path)")
      ->check(CLI::IsMember({"txt_dir", "jsonl"}));
  eval->add_option("--seed", cfg.seed, "split seed");
  eval->add_option("--split", cfg.split, "paired | halves")->check(CLI::IsMember({"paired", "halves"}));
  eval->add_option("--format", cfg.format, "json | markdown")->check(CLI::IsMember({"json", "markdown"}));

  auto* erase = app.add_subcommand("erase-sim", "run an erasure experiment from a setup file");
  erase->add_option("--setup", cfg.setup, "setup JSON")->required();
  erase->add_option("--mode", cfg.mode, "override the file's mode")
      ->check(CLI::IsMember({"nearest", "posterior", "exhaustive"}));

  auto* schemes = app.add_subcommand("schemes", "list schemes and registries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    detail::report_error(err, "usage", e.what());
    return kUsage;
  }

  std::shared_ptr<const VariantRegistry> registry;
  try {
    registry = VariantRegistry::from_environment();
  } catch (const std::exception& e) {
    detail::report_error(err, "registry", e.what());
    return kRuntime;
  }

  auto build_scheme = [&]() -> Scheme {
    SchemeOptions opt;
    opt.registry = registry;
    try {
      if (!cfg.base.empty()) opt.base = parse_codepoint(cfg.base);
      if (!cfg.mark.empty()) opt.mark = parse_codepoint(cfg.mark);
      opt.min_eligible = cfg.min_eligible;
      opt.min_ratio = cfg.min_ratio;
      return make_scheme(cfg.scheme, opt);
    } catch (const std::invalid_argument& e) {
      throw detail::UsageError(e.what());
    }
  };
  auto build_plan = [&]() {
    stego::StegoPlan plan;
    try {
      if (!cfg.alphabet.empty()) plan.alphabet = CodepointAlphabet::parse(cfg.alphabet);
      if (!cfg.mark.empty()) plan.mark = parse_codepoint(cfg.mark);
      plan.codec = parse_codec(cfg.codec);
    } catch (const std::invalid_argument& e) {
      throw detail::UsageError(e.what());
    }
    return plan;
  };

  try {
    if (schemes->parsed()) {
      out << service::schemes_json(*registry).dump(2) << '\n';
      return kOk;
    }
    if (mark->parsed() || strip->parsed() || detect->parsed()) {
      const Scheme scheme = build_scheme();
      const Text text = decode_utf8(detail::read_all(in));
      if (detect->parsed()) {
        nlohmann::json verdict = service::verdict_json(text, scheme);
        out << verdict.dump() << '\n';
        return verdict["detected"].get<bool>() ? kOk : kNotDetected;
      }
      out << encode_utf8(mark->parsed() ? apply_scheme(text, scheme) : strip_scheme(text, scheme));
      return kOk;
    }
    if (embed->parsed()) {
      const auto plan = build_plan();
      Bits payload;
      try {
        payload = stego::parse_payload(cfg.payload);
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(e.what());
      }
      const Text text = decode_utf8(detail::read_all(in));
      out << encode_utf8(stego::embed_payload(text, payload, plan).text);
      return kOk;
    }
    if (extract->parsed()) {
      const auto plan = build_plan();
      if (!cfg.bits && !(plan.alphabet && plan.codec == Codec::none)) {
        throw detail::UsageError("--bits is required unless --alphabet is given with --codec none");
      }
      const Text text = decode_utf8(detail::read_all(in));
      out << stego::to_json(stego::extract_payload(text, cfg.bits, plan)).dump() << '\n';
      return kOk;
    }
    if (eval->parsed()) {
      const Scheme scheme = build_scheme();
      harness::CorpusFormat fmt;
      if (!cfg.corpus_format.empty()) fmt = cfg.corpus_format == "jsonl" ? harness::CorpusFormat::jsonl : harness::CorpusFormat::txt_dir;
      else fmt = std::filesystem::is_directory(cfg.corpus) ? harness::CorpusFormat::txt_dir : harness::CorpusFormat::jsonl;
      const auto corpus = harness::load_corpus(cfg.corpus, fmt);
      for (const auto& w : corpus.warnings) {
        detail::report_error(err, "warning", "skipped document '" + w.id + "': " + w.message);
      }
      harness::EvalOptions opt;
      opt.seed = cfg.seed;
      opt.split = cfg.split == "halves" ? harness::Split::halves : harness::Split::paired;
      const auto report = harness::evaluate(scheme, corpus, opt);
      if (!report.premarked_ids.empty()) {
        detail::report_error(err, "warning", std::to_string(report.premarked_ids.size()) +
                                                 " document(s) already contained the mark before watermarking");
      }
      out << harness::emit_report(report, cfg.format == "markdown" ? harness::ReportFormat::markdown
                                                                   : harness::ReportFormat::json);
      return kOk;
    }
    if (erase->parsed()) {
      using namespace erasure;
      const auto doc = load_setup(cfg.setup);
      if (const auto* u = std::get_if<UniversalRequest>(&doc)) {
        out << to_json(verify_counterexample_universal(u->n)).dump(2) << '\n';
        return kOk;
      }
      const auto& setup = std::get<ErasureSetup>(doc);
      const Mode mode = cfg.mode.empty() ? setup.mode : parse_mode(cfg.mode);
      nlohmann::json j;
      j["mode"] = to_string(mode);
      if (mode == Mode::exhaustive) {
        j["records"] = nlohmann::json::array();
        for (const auto& r : enumerate_erasers(setup)) j["records"].push_back(to_json(r, setup.space));
      } else {
        j["report"] = to_json(run_experiment(setup, mode));
        if (mode == Mode::posterior) {
          j["law_total_variation"] = nlohmann::json::array();
          const auto law_x = law_of_generated(setup);
          for (std::size_t k = 0; k < setup.n_keys(); ++k) {
            j["law_total_variation"].push_back(total_variation(law_of_posterior_erasure(setup, k), law_x).str());
          }
        }
      }
      out << j.dump(2) << '\n';
      return kOk;
    }
  } catch (const detail::UsageError& e) {
    detail::report_error(err, "usage", e.what());
    return kUsage;
  } catch (const erasure::SetupInvalid& e) {
    detail::report_error(err, "SetupInvalid", e.what(), erasure::violations_to_json(e.violations()));
    return kRuntime;
  } catch (const MessageTooLong& e) {
    detail::report_error(err, "MessageTooLong", e.what());
    return kRuntime;
  } catch (const InsufficientPositions& e) {
    detail::report_error(err, "InsufficientPositions", e.what());
    return kRuntime;
  } catch (const DecodeFailure& e) {
    detail::report_error(err, "DecodeFailure", e.what());
    return kRuntime;
  } catch (const Utf8Error& e) {
    detail::report_error(err, "Utf8Error", e.what());
    return kRuntime;
  } catch (const harness::FormatError& e) {
    detail::report_error(err, "FormatError", e.what());
    return kRuntime;
  } catch (const harness::IoError& e) {
    detail::report_error(err, "IoError", e.what());
    return kRuntime;
  } catch (const std::exception& e) {
    detail::report_error(err, "error", e.what());
    return kRuntime;
  }
  detail::report_error(err, "usage", "no subcommand");
  return kUsage;
}

}  // namespace unimark::cli
