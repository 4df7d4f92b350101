#pragma once
// HTTP front end: POST /<operation> with the operation's JSON body.

#include <functional>
#include <string>

#include <httplib.h>

#include "bsx/api.hpp"

namespace bsx {

using request_logger = std::function<void(const std::string& path, int status)>;

inline void install_routes(httplib::Server& server, request_logger log = {}) {
  for (const auto& [name, op] : api::operations()) {
    (void)op;
    const std::string path = "/" + name;
    server.Post(path, [name, path, log](const httplib::Request& req, httplib::Response& res) {
      api::response r = api::run_text(name, req.body);
      res.status = r.status;
      res.set_content(r.text(), "application/json");
      if (log) log(path, r.status);
    });
  }
  // the builder UI is served from a different origin
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

}  // namespace bsx
