#include <gtest/gtest.h>

#include <sstream>

#include "unimark/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "unimark");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = unimark::cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string setup_path(const std::string& name) { return std::string(UNIMARK_DATA_DIR) + "/setups/" + name; }

const std::string kThreePerEm = "\xE2\x80\x84";

TEST(CliTest, MarkIsByteTransparent) {
  const auto r = run({"mark", "--scheme", "whitemark"}, "a b");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "a" + kThreePerEm + "b");
  // no trailing newline is added and CRLF / combining marks survive
  const std::string raw = "e\xCC\x81\r\n x";
  EXPECT_EQ(run({"mark"}, raw).out, "e\xCC\x81\r\n" + kThreePerEm + "x");
}

TEST(CliTest, DetectExitCodes) {
  const auto plain = run({"detect", "--scheme", "whitemark"}, "plain text here");
  EXPECT_EQ(plain.code, 3);
  EXPECT_FALSE(nlohmann::json::parse(plain.out)["detected"].get<bool>());
  const auto marked = run({"detect"}, "a" + kThreePerEm + "b");
  EXPECT_EQ(marked.code, 0);
  EXPECT_EQ(nlohmann::json::parse(marked.out)["mark_count"], 1);
}

TEST(CliTest, StripUndoesMark) {
  const auto marked = run({"mark", "--scheme", "printmark-whitespace"}, "a b c d e f").out;
  EXPECT_EQ(run({"detect", "--scheme", "printmark-whitespace"}, marked).code, 0);
  EXPECT_EQ(run({"strip", "--scheme", "printmark-whitespace"}, marked).out, "a b c d e f");
}

TEST(CliTest, CustomMarkAndBadCodepoint) {
  EXPECT_EQ(run({"mark", "--mark", "U+2009"}, "a b").out, "a\xE2\x80\x89" "b");
  const auto bad = run({"mark", "--mark", "U+0041"}, "a b");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(nlohmann::json::parse(bad.err)["code"], "usage");
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"mark", "--scheme", "nope"}).code, 1);
  EXPECT_EQ(run({"embed"}).code, 1);
  EXPECT_EQ(run({"embed", "--payload", "101", "--alphabet", "U+2000,U+2004", "--mark", "U+2004"}).code, 1);
  EXPECT_EQ(run({"extract"}, "a b").code, 1);
}

TEST(CliTest, InvalidUtf8IsRuntimeError) {
  const auto r = run({"mark"}, "bad \xFF");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["code"], "Utf8Error");
}

TEST(CliTest, EmbedExtractPositional) {
  const std::string text = "one two three four five six seven eight";
  const auto e = run({"embed", "--payload", "1101001"}, text);
  ASSERT_EQ(e.code, 0);
  const auto x = run({"extract", "--bits", "7"}, e.out);
  ASSERT_EQ(x.code, 0);
  EXPECT_EQ(nlohmann::json::parse(x.out)["bits"], "1101001");
}

TEST(CliTest, EmbedExtractAlphabetAndCodec) {
  const std::string text(300, ' ');
  const auto e = run({"embed", "--payload", "0xbeef", "--alphabet", "U+2000,U+2001,U+2002,U+2003", "--codec", "hamming74"},
                     text);
  ASSERT_EQ(e.code, 0);
  const auto x = run({"extract", "--bits", "16", "--alphabet", "U+2000,U+2001,U+2002,U+2003", "--codec", "hamming74"},
                     e.out);
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_EQ(nlohmann::json::parse(x.out)["hex"], "0xbeef");

  const auto p = run({"embed", "--payload", "0x1f", "--alphabet", "U+2000,U+2001,U+2002"}, "a b c d e f");
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(nlohmann::json::parse(run({"extract", "--alphabet", "U+2000,U+2001,U+2002"}, p.out).out)["value"], "31");
}

TEST(CliTest, EmbedTooLong) {
  const auto r = run({"embed", "--payload", "1111"}, "a b");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["code"], "MessageTooLong");
}

TEST(CliTest, EraseSimMultimodal) {
  const auto r = run({"erase-sim", "--setup", setup_path("multimodal.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto& cands = j["records"][0]["candidates"];
  ASSERT_EQ(cands.size(), 3u);
  for (const auto& c : cands) EXPECT_FALSE(c["passed"].get<bool>());
}

TEST(CliTest, EraseSimNearestRejectsMultimodal) {
  const auto r = run({"erase-sim", "--setup", setup_path("multimodal.json"), "--mode", "nearest"});
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["code"], "SetupInvalid");
  EXPECT_EQ(j["details"][0]["condition"], "metric-closeness");
}

TEST(CliTest, EraseSimPosteriorAndUniversal) {
  const auto p = nlohmann::json::parse(run({"erase-sim", "--setup", setup_path("universal_case2.json")}).out);
  EXPECT_EQ(p["report"]["erase_success_prob"], "4/5");
  EXPECT_EQ(p["law_total_variation"][0], "0");
  const auto u = nlohmann::json::parse(run({"erase-sim", "--setup", setup_path("universal_n5.json")}).out);
  EXPECT_TRUE(u["all_fail"].get<bool>());
}

TEST(CliTest, EvalOnDirectory) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "unimark_cli_eval";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "a.txt") << "some words here";
  std::ofstream(dir / "b.txt") << "single";
  const auto r = run({"eval", "--corpus", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["fnr"], 0.5);
  EXPECT_EQ(j["false_negative_ids"][0], "b");
  const auto md = run({"eval", "--corpus", dir.string(), "--format", "markdown"});
  EXPECT_NE(md.out.find("| Method | BLEU | FNR | FPR |"), std::string::npos);
  fs::remove_all(dir);
  EXPECT_EQ(run({"eval", "--corpus", dir.string()}).code, 2);
}

TEST(CliTest, Schemes) {
  const auto r = run({"schemes"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schemes"].size(), 4u);
  EXPECT_EQ(j["whitespaces"][0]["codepoint"], "U+0020");
}

}  // namespace
