#include "axon/service.hpp"

#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace axon {

using nlohmann::json;

struct Service::Server {
  httplib::Server http;
  std::thread worker;
  int port = 0;
};

namespace {

HttpReply json_reply(const json& j, int status = 200) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& code, const std::string& message) {
  return json_reply(json{{"error", code}, {"message", message}}, status);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double query_number(const std::map<std::string, std::string>& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) fail(ErrorCode::kInvalidArgument, "missing query parameter '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "query parameter '" + key + "' is not a number");
}

json query_numbers(const std::string& text, std::size_t n, const std::string& key) {
  const auto parts = split(text, ',');
  if (parts.size() != n) fail(ErrorCode::kInvalidArgument, "query parameter '" + key + "' needs " + std::to_string(n) + " numbers");
  json out = json::array();
  for (const auto& p : parts) {
    try {
      out.push_back(std::stod(p));
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "query parameter '" + key + "' is not numeric");
    }
  }
  return out;
}

long long to_id(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "'" + text + "' is not an id");
}

// "7:A" pipe end, "9/1" block attachment point.
json origin_arg(const std::string& text) {
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    return json{{"block", to_id(text.substr(0, slash))}, {"slot", to_id(text.substr(slash + 1))}};
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorCode::kInvalidArgument, "origin '" + text + "' is neither pipe:end nor block/slot");
  return json{{"pipe", to_id(text.substr(0, colon))}, {"end", text.substr(colon + 1)}};
}

json render_args(const std::map<std::string, std::string>& q) {
  json args = json::object();
  if (auto it = q.find("projection"); it != q.end()) args["projection"] = it->second;
  if (auto it = q.find("glyph"); it != q.end()) args["glyph"] = it->second == "1" || it->second == "true";
  return args;
}

}  // namespace

Service::Service(Session& session) : session_(session) {}
Service::~Service() { stop(); }

int Service::status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownId: return 404;
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kStaleToken: return 410;
    default: return 409;
  }
}

HttpReply Service::handle(const std::string& method, const std::string& path,
                          const std::map<std::string, std::string>& query, const std::string& body) {
  std::lock_guard<std::mutex> lock(mutex_);
  try {
    const auto under = [&](const std::string& prefix) {
      return path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0;
    };
    if (method == "GET") {
      if (path == "/scheme") return json_reply(scheme_to_json(session_.scheme()));
      if (path == "/render.svg") {
        return {200, "image/svg+xml", session_.execute("render", render_args(query)).at("svg").get<std::string>()};
      }
      if (path == "/preview.svg") {
        RenderSettings rs;
        if (auto it = query.find("projection"); it != query.end()) rs.projection = projection_by_name(it->second);
        return {200, "image/svg+xml", emit_svg(session_.preview_drawing(rs), rs)};
      }
      if (path == "/pick") {
        json args = {{"x", query_number(query, "x")}, {"y", query_number(query, "y")}};
        if (auto it = query.find("classes"); it != query.end()) args["classes"] = split(it->second, ',');
        if (auto it = query.find("projection"); it != query.end()) args["projection"] = it->second;
        return json_reply(session_.execute("pick", args));
      }
      if (path == "/variants/orientation") {
        auto sym = query.find("symbol");
        auto at = query.find("at");
        if (sym == query.end() || at == query.end()) fail(ErrorCode::kInvalidArgument, "symbol and at are required");
        json args = {{"symbol", sym->second}, {"at", query_numbers(at->second, 3, "at")}};
        if (query.count("snap")) args["snap"] = query_number(query, "snap");
        if (auto it = query.find("extra"); it != query.end()) {
          json extra = json::array();
          for (const auto& p : split(it->second, ',')) extra.push_back(to_id(p));
          args["extra"] = extra;
        }
        return json_reply(session_.execute("variants_orientation", args));
      }
      if (path == "/variants/dimension") {
        auto it = query.find("origins");
        if (it == query.end()) fail(ErrorCode::kInvalidArgument, "origins are required");
        json origins = json::array();
        for (const auto& p : split(it->second, ';')) origins.push_back(origin_arg(p));
        return json_reply(session_.execute("variants_dimension", {{"origins", origins}}));
      }
      if (path == "/library") return json_reply(session_.execute("library", json::object()));
      if (path == "/catalogs") return json_reply(session_.execute("catalogs", json::object()));
      if (path == "/verbs") return json_reply(json{{"verbs", Session::verbs()}});
      if (path == "/pending") {
        const auto& p = session_.pending();
        if (!p) return json_reply(json{{"pending", nullptr}});
        return json_reply(json{{"pending", {{"token", p->token},
                                            {"verb", p->verb},
                                            {"preview", std::vector<ObjectId>(p->highlight.begin(), p->highlight.end())}}}});
      }
    } else if (method == "POST") {
      if (under("/op/")) {
        json args = json::object();
        if (!body.empty()) {
          try {
            args = json::parse(body);
          } catch (const json::parse_error& e) {
            fail(ErrorCode::kParseError, std::string("request body is not JSON: ") + e.what());
          }
        }
        return json_reply(session_.execute(path.substr(4), args));
      }
      if (under("/confirm/")) return json_reply(session_.confirm(path.substr(9)));
      if (under("/cancel/")) {
        session_.cancel(path.substr(8));
        return json_reply(json::object());
      }
    }
    return error_reply(404, "NotFound", method + " " + path);
  } catch (const Error& e) {
    return error_reply(status_for(e.code()), std::string(e.code_name()), e.what());
  }
}

void Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    const HttpReply reply = handle(req.method, req.path, query, req.body);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  // Only SO_REUSEADDR: the library default also sets SO_REUSEPORT, which lets
  // a second server share a busy port.
  server_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  server_->http.Get(R"(/.*)", route);
  server_->http.Post(R"(/.*)", route);
  if (port == 0) {
    server_->port = server_->http.bind_to_any_port(host);
    if (server_->port < 0) fail(ErrorCode::kPortInUse, "cannot bind " + host);
  } else {
    if (!server_->http.bind_to_port(host, port)) {
      server_.reset();
      fail(ErrorCode::kPortInUse, "port " + std::to_string(port) + " is not available");
    }
    server_->port = port;
  }
}

void Service::listen(const std::string& host, int port) {
  bind(host, port);
  server_->http.listen_after_bind();
}

int Service::start(const std::string& host, int port) {
  bind(host, port);
  server_->worker = std::thread([srv = server_.get()] { srv->http.listen_after_bind(); });
  server_->http.wait_until_ready();
  return server_->port;
}

void Service::stop() {
  if (!server_) return;
  server_->http.stop();
  if (server_->worker.joinable()) server_->worker.join();
  server_.reset();
}

}  // namespace axon
