#include <gtest/gtest.h>

#include <thread>

#include "unimark/service.hpp"

namespace {

using unimark::service::Config;
using unimark::service::handle;
using nlohmann::json;

const std::string kThreePerEm = "\xE2\x80\x84";

json post(const std::string& path, const json& body, int expect = 200, const Config& cfg = {}) {
  const auto r = handle("POST", path, body.dump(), cfg);
  EXPECT_EQ(r.status, expect) << r.body.dump();
  return r.body;
}

TEST(ServiceTest, Mark) {
  const auto r = post("/v1/mark", {{"text", "a b"}, {"scheme", "whitemark"}});
  EXPECT_EQ(r["text"], "a" + kThreePerEm + "b");
  ASSERT_EQ(r["annotations"].size(), 1u);
  EXPECT_EQ(r["annotations"][0], (json{{"offset", 1}, {"length", 1}, {"codepoint", "U+2004"}, {"kind", "mark"}}));
}

TEST(ServiceTest, DetectUnmarked) {
  const auto r = post("/v1/detect", {{"text", "plain words"}});
  EXPECT_FALSE(r["verdict"]["detected"].get<bool>());
  EXPECT_TRUE(r["annotations"].empty());
}

TEST(ServiceTest, DetectIsStableAcrossResubmission) {
  const auto marked = post("/v1/mark", {{"text", "a b c d e f g"}, {"scheme", "printmark-whitespace"}})["text"];
  const auto first = post("/v1/detect", {{"text", marked}, {"scheme", "printmark-whitespace"}});
  const auto second = post("/v1/detect", {{"text", first["text"]}, {"scheme", "printmark-whitespace"}});
  EXPECT_EQ(first, second);
  EXPECT_TRUE(first["verdict"]["detected"].get<bool>());
}

TEST(ServiceTest, Strip) {
  const auto r = post("/v1/strip", {{"text", "x" + kThreePerEm + "y"}});
  EXPECT_EQ(r["text"], "x y");
}

TEST(ServiceTest, VariantmarkAnnotationsPointAtSelectors) {
  const auto r = post("/v1/mark", {{"text", "鯖鯖"}, {"scheme", "variantmark"}});
  ASSERT_EQ(r["annotations"].size(), 1u);
  EXPECT_EQ(r["annotations"][0]["offset"], 1);
  EXPECT_EQ(r["annotations"][0]["kind"], "selector");
}

TEST(ServiceTest, EmbedExtractRoundTrip) {
  const std::string text = "one two three four five six seven eight";
  const auto e = post("/v1/embed", {{"text", text}, {"params", {{"payload", "1101001"}}}});
  EXPECT_EQ(e["positions_used"], 7);
  EXPECT_EQ(e["annotations"].size(), 4u);
  const auto x = post("/v1/extract", {{"text", e["text"]}, {"params", {{"bits", 7}}}});
  EXPECT_EQ(x["bits"], "1101001");
}

TEST(ServiceTest, EmbedWithCodec) {
  const std::string text(200, ' ');
  const json params{{"payload", "0xabc"}, {"codec", "repetition3"}, {"alphabet", "U+2000,U+2001"}};
  const auto e = post("/v1/embed", {{"text", text}, {"params", params}});
  json xp = params;
  xp.erase("payload");
  xp["bits"] = 12;
  EXPECT_EQ(post("/v1/extract", {{"text", e["text"]}, {"params", xp}})["hex"], "0xabc");
}

TEST(ServiceTest, BadRequests) {
  EXPECT_EQ(post("/v1/mark", {{"text", 5}}, 400)["field"], "text");
  EXPECT_EQ(post("/v1/mark", {{"text", "a"}, {"scheme", "nope"}}, 400)["field"], "scheme");
  EXPECT_EQ(post("/v1/mark", {{"text", "a"}, {"params", {{"mark", "U+0041"}}}}, 400)["field"], "scheme");
  EXPECT_EQ(post("/v1/mark", {{"text", "a"}, {"params", {{"mark", "zz"}}}}, 400)["field"], "params.mark");
  EXPECT_EQ(post("/v1/embed", {{"text", "a b"}}, 400)["field"], "params.payload");
  EXPECT_EQ(post("/v1/extract", {{"text", "a b"}}, 400)["field"], "params.bits");
  EXPECT_EQ(handle("POST", "/v1/mark", "{not json").status, 400);
  EXPECT_EQ(handle("POST", "/v1/mark", "[1]").status, 400);
  EXPECT_EQ(handle("POST", "/v1/nope", "{}").status, 404);
  EXPECT_EQ(handle("DELETE", "/v1/mark", "{}").status, 405);
}

TEST(ServiceTest, InvalidUtf8) {
  const std::string body = std::string("{\"text\":\"a") + "\xFF" + "\"}";
  EXPECT_EQ(handle("POST", "/v1/mark", body).status, 400);
}

TEST(ServiceTest, PayloadTooLarge) {
  Config cfg;
  cfg.max_text_bytes = 16;
  EXPECT_EQ(post("/v1/mark", {{"text", std::string(17, 'a')}}, 413, cfg)["field"], "text");
  post("/v1/mark", {{"text", std::string(16, 'a')}}, 200, cfg);
}

TEST(ServiceTest, StegoErrorsAre422) {
  post("/v1/embed", {{"text", "a b"}, {"params", {{"payload", "1111"}}}}, 422);
  post("/v1/extract", {{"text", "a b"}, {"params", {{"bits", 4}}}}, 422);
}

TEST(ServiceTest, Schemes) {
  const auto r = handle("GET", "/v1/schemes", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["schemes"].size(), 4u);
}

TEST(ServiceHttpTest, OverRealSocket) {
  httplib::Server server;
  Config cfg;
  cfg.cors_origin = "http://localhost:5173";
  unimark::service::install_routes(server, cfg);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto r = client.Post("/v1/mark", json{{"text", "a b"}}.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_EQ(json::parse(r->body)["text"], "a" + kThreePerEm + "b");

  const auto opt = client.Options("/v1/detect");
  ASSERT_TRUE(opt);
  EXPECT_EQ(opt->status, 204);

  const auto missing = client.Post("/v1/extract", json{{"text", "a b"}}.dump(), "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 400);

  const auto schemes = client.Get("/v1/schemes");
  ASSERT_TRUE(schemes);
  EXPECT_EQ(schemes->status, 200);

  server.stop();
  t.join();
}

}  // namespace
