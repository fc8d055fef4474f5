#include "axon/persistence.hpp"

#include <fstream>
#include <sstream>

#include "axon/core.hpp"
#include "axon/error.hpp"

namespace axon {

using nlohmann::json;

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }
json vec(Point3 p) { return json::array({p.x, p.y, p.z}); }

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::kParseError, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Point3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::kParseError, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json end_ref(PipeEndRef e) { return {{"pipe", e.pipe}, {"end", std::string(end_name(e.end))}}; }
PipeEndRef end_ref(const json& j) { return {j.at("pipe").get<ObjectId>(), parse_end(j.at("end").get<std::string>())}; }

json pipe_point(PipePoint p) { return {{"pipe", p.pipe}, {"t", p.t}}; }
PipePoint pipe_point(const json& j) { return {j.at("pipe").get<ObjectId>(), j.at("t").get<double>()}; }

json leader(const Leader& l) {
  json t;
  if (const auto* pp = std::get_if<PipePoint>(&l.target)) {
    t = pipe_point(*pp);
  } else {
    t = {{"block", std::get<BlockRef>(l.target).block}};
  }
  return {{"target", t}, {"anchor", vec(l.anchor)}};
}

Leader leader(const json& j) {
  const json& t = j.at("target");
  Leader l;
  if (t.contains("block")) {
    l.target = BlockRef{t.at("block").get<ObjectId>()};
  } else {
    l.target = pipe_point(t);
  }
  l.anchor = vec2(j.at("anchor"));
  return l;
}

json leaders(const std::vector<Leader>& ls) {
  json out = json::array();
  for (const auto& l : ls) out.push_back(leader(l));
  return out;
}

std::vector<Leader> leaders(const json& j) {
  std::vector<Leader> out;
  for (const auto& l : j) out.push_back(leader(l));
  return out;
}

json optional_id(const std::optional<ObjectId>& id) { return id ? json(*id) : json(nullptr); }
std::optional<ObjectId> optional_id(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<ObjectId>();
}

template <class Map, class Fn>
json list(const Map& m, Fn fn) {
  json out = json::array();
  for (const auto& [_, v] : m) out.push_back(fn(v));
  return out;
}

}  // namespace

json projection_to_json(const Projection& p) {
  return {{"name", p.name}, {"ex", vec(p.ex)}, {"ey", vec(p.ey)}, {"ez", vec(p.ez)}};
}

Projection projection_from_json(const json& j) {
  Projection p;
  p.name = j.at("name").get<std::string>();
  p.ex = vec2(j.at("ex"));
  p.ey = vec2(j.at("ey"));
  p.ez = vec2(j.at("ez"));
  validate_projection(p);
  return p;
}

json symbol_to_json(const SymbolDef& def) {
  json prims = json::array();
  for (const auto& p : def.primitives) {
    json jp = {{"kind", std::string(primitive_kind_name(p.kind))}};
    json pts = json::array();
    for (Vec2 q : p.points) pts.push_back(vec(q));
    jp["points"] = pts;
    if (p.kind == PrimitiveKind::kCircle || p.kind == PrimitiveKind::kArc) jp["radius"] = p.radius;
    if (p.kind == PrimitiveKind::kArc) {
      jp["startDeg"] = p.start_deg;
      jp["endDeg"] = p.end_deg;
    }
    prims.push_back(jp);
  }
  json att = {{"kind", std::string(attachment_kind_name(def.attachment.kind))}};
  if (def.attachment.cut_length) att["cut"] = *def.attachment.cut_length;
  json rays = json::array();
  for (const Ray& r : def.attachment.rays) rays.push_back({{"dir", vec(r.dir)}, {"length", r.length}});
  att["rays"] = rays;
  return {{"name", def.name},
          {"primitives", prims},
          {"attachment", att},
          {"symmetricAboutAxis", def.symmetric_about_axis},
          {"symmetricAboutNormal", def.symmetric_about_normal}};
}

SymbolDef symbol_from_json(const json& j) {
  SymbolDef def;
  def.name = j.at("name").get<std::string>();
  for (const auto& jp : j.at("primitives")) {
    Primitive p;
    p.kind = parse_primitive_kind(jp.at("kind").get<std::string>());
    for (const auto& q : jp.at("points")) p.points.push_back(vec2(q));
    p.radius = jp.value("radius", 0.0);
    p.start_deg = jp.value("startDeg", 0.0);
    p.end_deg = jp.value("endDeg", 0.0);
    def.primitives.push_back(std::move(p));
  }
  const json& att = j.at("attachment");
  def.attachment.kind = parse_attachment_kind(att.at("kind").get<std::string>());
  if (att.contains("cut") && !att.at("cut").is_null()) def.attachment.cut_length = att.at("cut").get<double>();
  if (att.contains("rays")) {
    for (const auto& r : att.at("rays")) def.attachment.rays.push_back({vec2(r.at("dir")), r.at("length").get<double>()});
  }
  def.symmetric_about_axis = j.value("symmetricAboutAxis", false);
  def.symmetric_about_normal = j.value("symmetricAboutNormal", false);
  return def;
}

json scheme_to_json(const Scheme& s) {
  json doc;
  doc["format"] = "axon-scheme";
  doc["version"] = kFormatVersion;
  doc["nextId"] = s.next_id;

  json vis = json::object();
  for (const auto& [c, v] : s.settings.visibility) vis[std::string(object_class_name(c))] = v;
  doc["settings"] = {{"projection", projection_to_json(s.settings.projection)},
                     {"visibility", vis},
                     {"library", s.settings.library},
                     {"numbering", s.settings.numbering == NumberingMode::kAuto ? "auto" : "manual"},
                     {"flangeSlots", s.settings.flange_slots},
                     {"floorLabel", s.settings.floor_label},
                     {"placementOrigin", vec(s.settings.placement_origin)}};

  doc["pipes"] = list(s.pipes, [](const Pipe& p) {
    return json{{"id", p.id}, {"a", vec(p.a)}, {"b", vec(p.b)}, {"visible", p.visible},
                {"designator", optional_id(p.designator)}};
  });
  doc["connections"] = list(s.connections, [](const Connection& c) {
    return json{{"id", c.id}, {"first", end_ref(c.first)}, {"second", end_ref(c.second)}};
  });
  doc["blocks"] = list(s.blocks, [](const BlockInstance& b) {
    json at = json::array();
    for (const auto& a : b.attachments) at.push_back({{"pipe", a.pipe}, {"slot", a.slot}});
    return json{{"id", b.id},
                {"symbol", b.symbol},
                {"position", vec(b.position)},
                {"frame", {{"u", vec(b.frame.u)}, {"v", vec(b.frame.v)}, {"n", vec(b.frame.n)}}},
                {"scale", b.scale},
                {"attachments", at},
                {"designator", optional_id(b.designator)}};
  });
  doc["dimensions"] = list(s.dimensions, [](const ChainDimension& d) {
    json origins = json::array();
    for (const auto& o : d.origins) {
      if (const auto* e = std::get_if<PipeEndRef>(&o)) {
        origins.push_back(end_ref(*e));
      } else {
        const auto& r = std::get<BlockPointRef>(o);
        origins.push_back({{"block", r.block}, {"slot", r.slot}});
      }
    }
    return json{{"id", d.id}, {"origins", origins}, {"axis", std::string(axis_name(d.axis))},
                {"side", d.side}, {"offset", d.offset}};
  });
  doc["texts"] = list(s.texts, [](const TextAnnotation& t) {
    return json{{"id", t.id}, {"text", t.text}, {"leaders", leaders(t.leaders)}, {"mainLeader", t.main_leader}};
  });
  doc["designators"] = list(s.designators, [](const PositionDesignator& pd) {
    return json{{"id", pd.id}, {"positions", pd.positions}, {"target", pd.target},
                {"leaders", leaders(pd.leaders)}, {"mainLeader", pd.main_leader}};
  });
  doc["heightMarks"] = list(s.height_marks, [](const HeightMark& h) {
    return json{{"id", h.id}, {"at", pipe_point(h.at)}, {"level", h.level}};
  });
  doc["offsets"] = list(s.offsets, [](const OffsetSpec& o) {
    json broken = json::array();
    for (const auto& bp : o.broken_pipes) broken.push_back(pipe_point(bp));
    return json{{"id", o.id},
                {"kind", o.kind == OffsetKind::kGlobal ? "global" : "local"},
                {"anchor", pipe_point(o.anchor)},
                {"sign", o.half_space_sign},
                {"shift", vec(o.paper_shift)},
                {"broken", broken},
                {"scopePipe", optional_id(o.scope_pipe)}};
  });
  doc["grids"] = list(s.grids, [](const ConstructionGrid& g) {
    json axes = json::array();
    for (const auto& a : g.axes) {
      axes.push_back({{"label", a.label},
                      {"family", a.family == GridFamily::kLetters ? "letters" : "numbers"},
                      {"offset", a.offset}});
    }
    return json{{"id", g.id}, {"axes", axes}};
  });
  doc["symbols"] = list(s.symbols, [](const SymbolDef& d) { return symbol_to_json(d); });
  json spec = json::array();
  for (const auto& [pos, row] : s.spec) {
    spec.push_back({{"position", pos},
                    {"name", row.name},
                    {"typeBrand", row.type_brand},
                    {"code", row.code},
                    {"unit", row.unit},
                    {"quantity", row.quantity ? json(*row.quantity) : json(nullptr)},
                    {"catalogRef", row.catalog_ref},
                    {"extra", row.extra}});
  }
  doc["spec"] = spec;
  return doc;
}

namespace {

Scheme parse_scheme(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParseError, "scheme document must be an object");
  if (doc.value("format", std::string()) != "axon-scheme") fail(ErrorCode::kParseError, "not an axon scheme");
  if (!doc.contains("version") || !doc.at("version").is_number_integer() ||
      doc.at("version").get<int>() != kFormatVersion) {
    fail(ErrorCode::kVersionMismatch, "unsupported scheme version " + doc.value("version", json()).dump());
  }
  Scheme s;
  s.next_id = doc.at("nextId").get<ObjectId>();

  const json& st = doc.at("settings");
  s.settings.projection = projection_from_json(st.at("projection"));
  for (const auto& [k, v] : st.at("visibility").items()) s.settings.visibility[parse_object_class(k)] = v.get<bool>();
  s.settings.library = st.at("library").get<std::string>();
  const std::string numbering = st.at("numbering").get<std::string>();
  if (numbering != "auto" && numbering != "manual") fail(ErrorCode::kParseError, "bad numbering '" + numbering + "'");
  s.settings.numbering = numbering == "auto" ? NumberingMode::kAuto : NumberingMode::kManual;
  s.settings.flange_slots = st.at("flangeSlots").get<int>();
  s.settings.floor_label = st.at("floorLabel").get<std::string>();
  s.settings.placement_origin = vec2(st.at("placementOrigin"));

  auto put = [](auto& map, auto value, const char* what) {
    if (!map.emplace(value.id, value).second) {
      fail(ErrorCode::kParseError, std::string("duplicate ") + what + " id " + std::to_string(value.id));
    }
  };
  for (const auto& j : doc.at("pipes")) {
    put(s.pipes, Pipe{j.at("id").get<ObjectId>(), vec3(j.at("a")), vec3(j.at("b")), j.at("visible").get<bool>(),
                      optional_id(j, "designator")},
        "pipe");
  }
  for (const auto& j : doc.at("connections")) {
    put(s.connections, Connection{j.at("id").get<ObjectId>(), end_ref(j.at("first")), end_ref(j.at("second"))},
        "connection");
  }
  for (const auto& j : doc.at("blocks")) {
    BlockInstance b;
    b.id = j.at("id").get<ObjectId>();
    b.symbol = j.at("symbol").get<std::string>();
    b.position = vec3(j.at("position"));
    const json& f = j.at("frame");
    b.frame = {vec3(f.at("u")), vec3(f.at("v")), vec3(f.at("n"))};
    b.scale = j.at("scale").get<double>();
    for (const auto& a : j.at("attachments")) b.attachments.push_back({a.at("pipe").get<ObjectId>(), a.at("slot").get<int>()});
    b.designator = optional_id(j, "designator");
    put(s.blocks, b, "block");
  }
  for (const auto& j : doc.at("dimensions")) {
    ChainDimension d;
    d.id = j.at("id").get<ObjectId>();
    for (const auto& o : j.at("origins")) {
      if (o.contains("block")) {
        d.origins.push_back(BlockPointRef{o.at("block").get<ObjectId>(), o.at("slot").get<int>()});
      } else {
        d.origins.push_back(end_ref(o));
      }
    }
    d.axis = parse_axis(j.at("axis").get<std::string>());
    d.side = j.at("side").get<int>();
    d.offset = j.at("offset").get<double>();
    put(s.dimensions, d, "dimension");
  }
  for (const auto& j : doc.at("texts")) {
    put(s.texts, TextAnnotation{j.at("id").get<ObjectId>(), j.at("text").get<std::string>(), leaders(j.at("leaders")),
                                j.at("mainLeader").get<int>()},
        "text");
  }
  for (const auto& j : doc.at("designators")) {
    put(s.designators,
        PositionDesignator{j.at("id").get<ObjectId>(), j.at("positions").get<std::vector<int>>(),
                           j.at("target").get<ObjectId>(), leaders(j.at("leaders")), j.at("mainLeader").get<int>()},
        "designator");
  }
  for (const auto& j : doc.at("heightMarks")) {
    put(s.height_marks, HeightMark{j.at("id").get<ObjectId>(), pipe_point(j.at("at")), j.at("level").get<double>()},
        "height mark");
  }
  for (const auto& j : doc.at("offsets")) {
    OffsetSpec o;
    o.id = j.at("id").get<ObjectId>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "global" && kind != "local") fail(ErrorCode::kParseError, "bad offset kind '" + kind + "'");
    o.kind = kind == "global" ? OffsetKind::kGlobal : OffsetKind::kLocal;
    o.anchor = pipe_point(j.at("anchor"));
    o.half_space_sign = j.at("sign").get<int>();
    o.paper_shift = vec2(j.at("shift"));
    for (const auto& bp : j.at("broken")) o.broken_pipes.push_back(pipe_point(bp));
    o.scope_pipe = optional_id(j, "scopePipe");
    put(s.offsets, o, "offset");
  }
  for (const auto& j : doc.at("grids")) {
    ConstructionGrid g;
    g.id = j.at("id").get<ObjectId>();
    for (const auto& a : j.at("axes")) {
      const std::string fam = a.at("family").get<std::string>();
      if (fam != "letters" && fam != "numbers") fail(ErrorCode::kParseError, "bad grid family '" + fam + "'");
      g.axes.push_back({a.at("label").get<std::string>(), fam == "letters" ? GridFamily::kLetters : GridFamily::kNumbers,
                        a.at("offset").get<double>()});
    }
    put(s.grids, g, "grid");
  }
  for (const auto& j : doc.at("symbols")) {
    SymbolDef d = symbol_from_json(j);
    const std::string name = d.name;
    if (!s.symbols.emplace(name, std::move(d)).second) fail(ErrorCode::kParseError, "duplicate symbol '" + name + "'");
  }
  for (const auto& j : doc.at("spec")) {
    SpecRow row;
    const int pos = j.at("position").get<int>();
    row.name = j.at("name").get<std::string>();
    row.type_brand = j.at("typeBrand").get<std::string>();
    row.code = j.at("code").get<std::string>();
    row.unit = j.at("unit").get<std::string>();
    if (!j.at("quantity").is_null()) row.quantity = j.at("quantity").get<double>();
    row.catalog_ref = j.at("catalogRef").get<std::string>();
    row.extra = j.at("extra").get<std::map<std::string, std::string>>();
    if (!s.spec.emplace(pos, std::move(row)).second) {
      fail(ErrorCode::kParseError, "duplicate spec position " + std::to_string(pos));
    }
  }
  return s;
}

}  // namespace

Scheme scheme_from_json(const json& doc) {
  try {
    return parse_scheme(doc);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    fail(ErrorCode::kParseError, e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed scheme: ") + e.what());
  }
}

std::string save_string(const Scheme& scheme) { return scheme_to_json(scheme).dump(2) + "\n"; }

Scheme load_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("malformed JSON: ") + e.what());
  }
  return scheme_from_json(doc);
}

void save(const Scheme& scheme, const std::string& path) {
  const std::string text = save_string(scheme);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scheme load(const std::string& path) { return load_string(read_file(path)); }

json library_to_json(const Library& lib) {
  json symbols = json::object();
  for (const auto& [name, def] : lib.symbols) symbols[name] = symbol_to_json(def);
  return {{"name", lib.name}, {"symbols", symbols}};
}

Library library_from_json(const json& j, const std::string& fallback_name) {
  try {
    Library lib;
    lib.name = j.value("name", fallback_name);
    for (const auto& [name, body] : j.at("symbols").items()) {
      json def = body;
      if (!def.contains("name")) def["name"] = name;
      SymbolDef d = symbol_from_json(def);
      if (d.name != name) fail(ErrorCode::kParseError, "symbol key '" + name + "' names '" + d.name + "'");
      const auto v = validate_symbol(d);
      if (!v.empty()) {
        fail(ErrorCode::kParseError, "symbol '" + name + "': " + std::string(symbol_violation_name(v.front())));
      }
      lib.symbols.emplace(name, std::move(d));
    }
    return lib;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    fail(ErrorCode::kParseError, e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed library: ") + e.what());
  }
}

Library load_library(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("malformed JSON: ") + e.what());
  }
  std::string stem = path.substr(path.find_last_of("/\\") + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.erase(dot);
  return library_from_json(doc, stem);
}

}  // namespace axon
