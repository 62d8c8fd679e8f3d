#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "unimark/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTP/JSON API for unimark", "unimark-service"};
  std::string listen = "127.0.0.1";
  int port = 8080;
  std::size_t max_bytes = 1u << 20;
  std::string cors = "*";
  app.add_option("--listen", listen, "bind address");
  app.add_option("--port", port, "TCP port");
  app.add_option("--max-bytes", max_bytes, "largest accepted text, in UTF-8 bytes");
  app.add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
  CLI11_PARSE(app, argc, argv);

  unimark::service::Config cfg;
  cfg.max_text_bytes = max_bytes;
  cfg.cors_origin = cors;
  try {
    cfg.registry = unimark::VariantRegistry::from_environment();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  httplib::Server server;
  unimark::service::install_routes(server, cfg);
  std::cerr << "listening on " << listen << ":" << port << '\n';
  if (!server.listen(listen, port)) {
    std::cerr << "cannot bind " << listen << ":" << port << '\n';
    return 2;
  }
  return 0;
}
