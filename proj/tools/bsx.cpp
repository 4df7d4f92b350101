// Command-line front end. Every subcommand builds a request and hands it to
// the same handlers the HTTP service uses.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bsx/service.hpp"

namespace {

constexpr int usage_error = 2;

struct usage_failure {
  std::string message;
};

bsx::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_failure{"cannot open " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return bsx::json::parse(buf.str());
  } catch (const bsx::json::parse_error& e) {
    throw usage_failure{path + ": " + e.what()};
  }
}

bsx::json parse_label(const std::string& text) {
  bool digits = !text.empty() && text.find_first_not_of("0123456789") == std::string::npos;
  if (digits && text.size() < 19) return std::stoll(text);
  return text;
}

int emit(const bsx::api::response& r) {
  std::cout << r.text();
  spdlog::debug("status {}", r.status);
  if (r.status != 200) return 1;
  if (r.body.is_object() && r.body.contains("ok") && !r.body["ok"].get<bool>()) return 1;
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("bsx");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("BSX_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Baumslag-Solitar subgroup toolkit"};
  app.require_subcommand(1);

  std::int64_t m = 0, n = 0;
  std::string k_text, file, file2, v, w, label, dir, from, to, from_orient, to_orient, word, vertex;
  unsigned rounds = 1;
  std::int64_t point = -1, q = 0, window = 3;
  bool dot = false;
  int port = 8080;
  std::string host = "127.0.0.1";

  auto add_params = [&](CLI::App* sub) {
    sub->add_option("-m", m, "first exponent")->required()->allow_extra_args(false);
    sub->add_option("-n", n, "second exponent")->required()->allow_extra_args(false);
  };

  auto* phen = app.add_subcommand("phenotype", "phenotype of K");
  add_params(phen);
  phen->add_option("K", k_text, "positive integer or inf")->required();

  auto* val = app.add_subcommand("validate", "check a graph or pre-action file");
  val->add_option("FILE", file)->required();

  auto* adm = app.add_subcommand("admissible", "labels allowed on the other end of an edge");
  add_params(adm);
  adm->add_option("--label", label)->required();
  adm->add_option("--dir", dir)->required()->check(CLI::IsMember({"out", "in"}));

  auto* wld = app.add_subcommand("weld", "identify two vertices");
  wld->add_option("FILE", file)->required();
  wld->add_option("V", v)->required();
  wld->add_option("W", w)->required();

  auto* con = app.add_subcommand("connect", "path between two labels");
  add_params(con);
  con->add_option("--from", from)->required();
  con->add_option("--to", to)->required();
  con->add_option("--from-orient", from_orient)->required()->check(CLI::IsMember({"+", "-"}));
  con->add_option("--to-orient", to_orient)->required()->check(CLI::IsMember({"+", "-"}));

  auto* sat = app.add_subcommand("saturate", "forest-saturate a graph");
  sat->add_option("FILE", file)->required();
  sat->add_option("--rounds", rounds);

  auto* mrg = app.add_subcommand("merge", "merge two graphs");
  mrg->add_option("FILE1", file)->required();
  mrg->add_option("FILE2", file2)->required();
  mrg->add_option("--rounds", rounds);

  auto* flp = app.add_subcommand("flip", "reverse every edge, swapping m and n");
  flp->add_option("FILE", file)->required();

  auto* rlz = app.add_subcommand("realize", "pre-action whose Bass-Serre graph is FILE");
  rlz->add_option("FILE", file)->required();

  auto* bss = app.add_subcommand("bass-serre", "Bass-Serre graph of a pre-action");
  bss->add_option("FILE", file)->required();
  bss->add_flag("--dot", dot, "Graphviz output");

  auto* sch = app.add_subcommand("schreier", "Schreier graph of a pre-action");
  sch->add_option("FILE", file)->required();
  sch->add_flag("--dot", dot, "Graphviz output");

  auto* evl = app.add_subcommand("eval", "act on a point by a word");
  evl->add_option("FILE", file)->required();
  evl->add_option("--point", point, "defaults to the basepoint");
  evl->add_option("--word", word)->required();

  auto* cls = app.add_subcommand("classify", "kernel verdict for a graph or pre-action");
  cls->add_option("FILE", file)->required();

  auto* mcq = app.add_subcommand("mcq", "MC_q membership of a pointed pre-action or graph vertex");
  mcq->add_option("FILE", file)->required();
  mcq->add_option("--vertex", vertex, "base vertex when FILE is a graph");

  auto* quo = app.add_subcommand("quotient", "window of the action on Z/q x| Z");
  add_params(quo);
  quo->add_option("-q", q)->required();
  quo->add_option("--window", window);

  auto* srv = app.add_subcommand("serve", "run the HTTP service");
  srv->add_option("--port", port);
  srv->add_option("--host", host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : usage_error;
  }

  try {
    using bsx::json;
    namespace api = bsx::api;
    json mn = {{"m", m}, {"n", n}};
    if (*phen) {
      json req = mn;
      req["k"] = parse_label(k_text);
      return emit(api::run("phenotype", req));
    }
    if (*val) return emit(api::run("validate", read_json_file(file)));
    if (*adm) {
      json req = mn;
      req["label"] = parse_label(label);
      req["dir"] = dir;
      return emit(api::run("admissible-targets", req));
    }
    if (*wld) return emit(api::run("weld", {{"graph", read_json_file(file)}, {"v", v}, {"w", w}}));
    if (*con) {
      json req = mn;
      req["from"] = parse_label(from);
      req["to"] = parse_label(to);
      req["from_orient"] = from_orient;
      req["to_orient"] = to_orient;
      return emit(api::run("connect", req));
    }
    if (*sat) return emit(api::run("saturate", {{"graph", read_json_file(file)}, {"rounds", rounds}}));
    if (*mrg)
      return emit(api::run("merge", {{"g1", read_json_file(file)},
                                     {"g2", read_json_file(file2)},
                                     {"rounds", rounds}}));
    if (*flp) return emit(api::run("flip", read_json_file(file)));
    if (*rlz) return emit(api::run("realize", read_json_file(file)));
    if (*bss || *sch) {
      json input = read_json_file(file);
      api::response r = api::run(*bss ? "bass-serre" : "schreier", input);
      if (!dot || r.status != 200) return emit(r);
      if (*bss)
        std::cout << bsx::to_dot(bsx::graph_from_json(r.body));
      else
        std::cout << bsx::schreier_dot(bsx::preaction_from_json(input));
      return 0;
    }
    if (*evl) {
      json req = {{"preaction", read_json_file(file)}, {"word", word}};
      if (point >= 0) req["point"] = point;
      return emit(api::run("eval", req));
    }
    if (*cls) return emit(api::run("classify", read_json_file(file)));
    if (*mcq) {
      json input = read_json_file(file);
      if (!vertex.empty()) input = {{"graph", input}, {"vertex", vertex}};
      return emit(api::run("mcq", input));
    }
    if (*quo) {
      json req = mn;
      req["q"] = q;
      req["window"] = window;
      return emit(api::run("quotient", req));
    }
    if (*srv) {
      httplib::Server server;
      bsx::install_routes(server, [](const std::string& path, int status) {
        spdlog::info("POST {} -> {}", path, status);
      });
      spdlog::info("listening on {}:{}", host, port);
      if (!server.listen(host, port)) {
        spdlog::error("cannot listen on {}:{}", host, port);
        return 1;
      }
      return 0;
    }
  } catch (const usage_failure& u) {
    std::cerr << u.message << "\n";
    return usage_error;
  }
  return usage_error;
}
