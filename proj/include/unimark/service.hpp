#pragma once

// Stateless JSON-over-HTTP front end for mark/detect/strip/embed/extract.
// handle() is transport-free so it can be exercised without sockets;
// install_routes() binds it to a cpp-httplib server.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "unimark/json_views.hpp"
#include "unimark/registry.hpp"
#include "unimark/scheme.hpp"
#include "unimark/stego_frontend.hpp"
#include "unimark/utf8.hpp"

namespace unimark::service {

struct Config {
  std::size_t max_text_bytes = 1u << 20;
  std::string cors_origin = "*";
  std::shared_ptr<const VariantRegistry> registry = VariantRegistry::builtin();
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

namespace detail {

struct BadRequest {
  int status;
  std::string error;
  std::string field;
};

inline Response error(int status, const std::string& message, const std::string& field = "") {
  return {status, {{"error", message}, {"field", field}}};
}

inline Text request_text(const nlohmann::json& req, const Config& cfg) {
  if (!req.contains("text") || !req["text"].is_string()) throw BadRequest{400, "text must be a string", "text"};
  const auto& bytes = req["text"].get_ref<const std::string&>();
  if (bytes.size() > cfg.max_text_bytes) {
    throw BadRequest{413, "text exceeds " + std::to_string(cfg.max_text_bytes) + " bytes", "text"};
  }
  try {
    return decode_utf8(bytes);
  } catch (const Utf8Error& e) {
    throw BadRequest{400, e.what(), "text"};
  }
}

inline const nlohmann::json& params_of(const nlohmann::json& req) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!req.contains("params")) return empty;
  if (!req["params"].is_object()) throw BadRequest{400, "params must be an object", "params"};
  return req["params"];
}

template <typename F>
auto field(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const BadRequest&) {
    throw;
  } catch (const StegoError&) {
    throw;
  } catch (const std::exception& e) {
    throw BadRequest{400, e.what(), name};
  }
}

inline Scheme request_scheme(const nlohmann::json& req, const Config& cfg) {
  const std::string name = field("scheme", [&] { return req.value("scheme", std::string("whitemark")); });
  const auto& p = params_of(req);
  SchemeOptions opt;
  opt.registry = cfg.registry;
  if (p.contains("base")) opt.base = field("params.base", [&] { return parse_codepoint(p["base"].get<std::string>()); });
  if (p.contains("mark")) opt.mark = field("params.mark", [&] { return parse_codepoint(p["mark"].get<std::string>()); });
  if (p.contains("min_eligible")) {
    opt.min_eligible = field("params.min_eligible", [&] { return p["min_eligible"].get<std::size_t>(); });
  }
  if (p.contains("min_ratio")) opt.min_ratio = field("params.min_ratio", [&] { return p["min_ratio"].get<double>(); });
  return field("scheme", [&] { return make_scheme(name, opt); });
}

inline stego::StegoPlan request_plan(const nlohmann::json& req) {
  const auto& p = params_of(req);
  stego::StegoPlan plan;
  if (p.contains("alphabet")) {
    plan.alphabet = field("params.alphabet", [&] { return CodepointAlphabet::parse(p["alphabet"].get<std::string>()); });
  }
  if (p.contains("mark")) plan.mark = field("params.mark", [&] { return parse_codepoint(p["mark"].get<std::string>()); });
  if (p.contains("codec")) plan.codec = field("params.codec", [&] { return parse_codec(p["codec"].get<std::string>()); });
  return plan;
}

}  // namespace detail

/// Dispatches one request. `path` is e.g. "/v1/mark"; `body` the raw request body.
inline Response handle(const std::string& method, const std::string& path, const std::string& body,
                       const Config& cfg = {}) {
  using detail::BadRequest;
  if (method == "GET" && path == "/v1/schemes") return {200, schemes_json(*cfg.registry)};
  if (method != "POST") return detail::error(405, "method not allowed");
  if (body.size() > cfg.max_text_bytes * 6 + 65536) return detail::error(413, "request body too large", "text");

  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const std::exception& e) {
    return detail::error(400, std::string("malformed JSON: ") + e.what());
  }
  if (!req.is_object()) return detail::error(400, "request body must be a JSON object");

  try {
    if (path == "/v1/mark" || path == "/v1/detect" || path == "/v1/strip") {
      const Text text = detail::request_text(req, cfg);
      const Scheme scheme = detail::request_scheme(req, cfg);
      nlohmann::json out;
      if (path == "/v1/detect") {
        out["text"] = encode_utf8(text);
        out["verdict"] = verdict_json(text, scheme);
        out["annotations"] = to_json(annotate(text, scheme));
        return {200, out};
      }
      const Text result = path == "/v1/mark" ? apply_scheme(text, scheme) : strip_scheme(text, scheme);
      out["text"] = encode_utf8(result);
      out["annotations"] = to_json(annotate(result, scheme));
      return {200, out};
    }
    if (path == "/v1/embed") {
      const Text text = detail::request_text(req, cfg);
      const auto plan = detail::request_plan(req);
      const auto& p = detail::params_of(req);
      if (!p.contains("payload") || !p["payload"].is_string()) {
        throw BadRequest{400, "params.payload must be a hex (0x...) or bit string", "params.payload"};
      }
      const Bits payload = detail::field("params.payload", [&] { return stego::parse_payload(p["payload"].get<std::string>()); });
      const auto r = stego::embed_payload(text, payload, plan);
      return {200,
              {{"text", encode_utf8(r.text)},
               {"positions_used", r.positions_used},
               {"annotations", to_json(annotate_stego(r.text, plan))}}};
    }
    if (path == "/v1/extract") {
      const Text text = detail::request_text(req, cfg);
      const auto plan = detail::request_plan(req);
      const auto& p = detail::params_of(req);
      std::optional<std::size_t> n_bits;
      if (p.contains("bits")) n_bits = detail::field("params.bits", [&] { return p["bits"].get<std::size_t>(); });
      const auto r = detail::field("params.bits", [&] { return stego::extract_payload(text, n_bits, plan); });
      nlohmann::json out = stego::to_json(r);
      out["text"] = encode_utf8(text);
      out["annotations"] = to_json(annotate_stego(text, plan));
      return {200, out};
    }
  } catch (const BadRequest& b) {
    return detail::error(b.status, b.error, b.field);
  } catch (const StegoError& e) {
    return detail::error(422, e.what(), "text");
  }
  return detail::error(404, "no such endpoint: " + path);
}

inline void install_routes(httplib::Server& server, const Config& cfg) {
  server.set_payload_max_length(cfg.max_text_bytes * 6 + 65536);
  auto bridge = [cfg](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.path, req.body, cfg);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", cfg.cors_origin);
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  for (const char* p : {"/v1/mark", "/v1/detect", "/v1/strip", "/v1/embed", "/v1/extract"}) server.Post(p, bridge);
  server.Get("/v1/schemes", bridge);
  server.Options(R"(/v1/.*)", [cfg](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", cfg.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace unimark::service
