#include "axon/session.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "axon/blocks.hpp"
#include "axon/core.hpp"
#include "axon/edit_ops.hpp"
#include "axon/error.hpp"
#include "axon/snap.hpp"

namespace axon {

using nlohmann::json;

namespace {

// ---- argument access ----

const json& need(const json& args, const char* key) {
  if (!args.is_object() || !args.contains(key) || args.at(key).is_null()) {
    fail(ErrorCode::kInvalidArgument, std::string("missing argument '") + key + "'");
  }
  return args.at(key);
}

bool has(const json& args, const char* key) { return args.is_object() && args.contains(key) && !args.at(key).is_null(); }

double number(const json& j) {
  if (!j.is_number()) fail(ErrorCode::kInvalidArgument, "expected a number, got " + j.dump());
  return j.get<double>();
}

ObjectId id_of(const json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(ErrorCode::kInvalidArgument, "expected an id, got " + j.dump());
  return j.get<ObjectId>();
}

int int_of(const json& j) {
  if (!j.is_number_integer()) fail(ErrorCode::kInvalidArgument, "expected an integer, got " + j.dump());
  return j.get<int>();
}

std::string str(const json& j) {
  if (!j.is_string()) fail(ErrorCode::kInvalidArgument, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

Point3 point(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::kInvalidArgument, "expected [x, y, z], got " + j.dump());
  return {number(j[0]), number(j[1]), number(j[2])};
}

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::kInvalidArgument, "expected [x, y], got " + j.dump());
  return {number(j[0]), number(j[1])};
}

PipeEndRef end_ref(const json& j) { return {id_of(need(j, "pipe")), parse_end(str(need(j, "end")))}; }
PipePoint pipe_point(const json& j) { return {id_of(need(j, "pipe")), number(need(j, "t"))}; }

LeaderTarget target(const json& j) {
  if (has(j, "block")) return BlockRef{id_of(j.at("block"))};
  return pipe_point(j);
}

DimOrigin origin(const json& j) {
  if (has(j, "block")) return BlockPointRef{id_of(j.at("block")), int_of(need(j, "slot"))};
  return end_ref(j);
}

IdSet id_set(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "expected an id list, got " + j.dump());
  IdSet out;
  for (const auto& x : j) out.insert(id_of(x));
  return out;
}

std::vector<ObjectId> id_list(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "expected an id list, got " + j.dump());
  std::vector<ObjectId> out;
  for (const auto& x : j) out.push_back(id_of(x));
  return out;
}

std::vector<int> int_list(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "expected a number list, got " + j.dump());
  std::vector<int> out;
  for (const auto& x : j) out.push_back(int_of(x));
  return out;
}

bool flag(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  fail(ErrorCode::kInvalidArgument, "expected true or false, got " + j.dump());
}

json ids(const std::vector<ObjectId>& v) { return json{{"ids", v}}; }
json ids(const IdSet& v) { return json{{"ids", std::vector<ObjectId>(v.begin(), v.end())}}; }

SpecRow spec_row(const json& j) {
  SpecRow r;
  r.name = j.value("name", "");
  r.type_brand = j.value("typeBrand", "");
  r.code = j.value("code", "");
  r.unit = j.value("unit", "");
  if (has(j, "quantity")) r.quantity = number(j.at("quantity"));
  r.catalog_ref = j.value("catalogRef", "");
  if (has(j, "extra")) r.extra = j.at("extra").get<std::map<std::string, std::string>>();
  return r;
}

json spec_row_json(const SpecRow& r) {
  return {{"name", r.name}, {"typeBrand", r.type_brand}, {"code", r.code}, {"unit", r.unit},
          {"quantity", r.quantity ? json(*r.quantity) : json(nullptr)}, {"catalogRef", r.catalog_ref},
          {"extra", r.extra}};
}

Projection projection_arg(const json& args) {
  if (has(args, "name")) return projection_by_name(str(args.at("name")));
  Projection p{vec2(need(args, "ex")), vec2(need(args, "ey")), vec2(need(args, "ez")), args.value("label", "custom")};
  validate_projection(p);
  return p;
}

PickKind pick_kind_arg(const json& j) { return parse_pick_kind(str(j)); }

json pick_target_json(const PickTarget& t) {
  json j = {{"kind", std::string(pick_kind_name(t.kind))}, {"id", t.id}};
  if (t.kind == PickKind::kPipeEnd) j["end"] = std::string(end_name(t.end));
  return j;
}

PickTarget pick_target(const json& j) {
  PickTarget t;
  t.kind = pick_kind_arg(need(j, "kind"));
  t.id = id_of(need(j, "id"));
  if (has(j, "end")) t.end = parse_end(str(j.at("end")));
  return t;
}

json orientation_json(const OrientationVariant& v) {
  return {{"u", {v.frame.u.x, v.frame.u.y, v.frame.u.z}},
          {"v", {v.frame.v.x, v.frame.v.y, v.frame.v.z}},
          {"n", {v.frame.n.x, v.frame.n.y, v.frame.n.z}},
          {"extensionAxis", std::string(axis_name(v.extension_axis))},
          {"rotated", v.rotated},
          {"mirrored", v.mirrored}};
}

RenderSettings render_settings(const json& args) {
  RenderSettings rs;
  if (has(args, "projection")) rs.projection = projection_by_name(str(args.at("projection")));
  if (has(args, "glyph")) rs.axes_glyph = flag(args.at("glyph"));
  if (has(args, "floorLabel")) rs.floor_label = str(args.at("floorLabel"));
  return rs;
}

std::vector<ObjectId> flatten(const std::vector<IdSet>& sets) {
  std::vector<ObjectId> out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  return out;
}

// ---- verb table ----

struct Verb {
  bool mutating;
  bool preview;
  std::function<json(Session&, Scheme&, const json&)> run;
};

using Table = std::map<std::string, Verb>;

const Table& table();

}  // namespace

Session::Session() {
  add_library(builtin_library());
  if (const char* dir = std::getenv("AXON_LIBRARY_PATH"); dir && *dir) {
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    if (ec) load_warnings_.push_back("cannot read library directory '" + std::string(dir) + "'");
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        add_library(load_library(f.string()));
      } catch (const Error& e) {
        load_warnings_.push_back(f.string() + ": " + e.what());
      }
    }
  }
}

Session::Session(Scheme scheme) : Session() { scheme_ = std::move(scheme); }

void Session::reset(Scheme scheme) {
  scheme_ = std::move(scheme);
  ++version_;
  pending_.reset();
}

void Session::add_library(Library lib) {
  const std::string name = lib.name;
  libraries_[name] = std::move(lib);
}

const Library& Session::current_library() const {
  auto it = libraries_.find(scheme_.settings.library);
  if (it == libraries_.end()) fail(ErrorCode::kUnknownSymbol, "library '" + scheme_.settings.library + "' is not loaded");
  return it->second;
}

const SymbolDef& Session::symbol(const std::string& name) const {
  if (auto lib = libraries_.find(scheme_.settings.library); lib != libraries_.end()) {
    if (auto it = lib->second.symbols.find(name); it != lib->second.symbols.end()) return it->second;
  }
  if (auto it = scheme_.symbols.find(name); it != scheme_.symbols.end()) return it->second;
  fail(ErrorCode::kUnknownSymbol, "no symbol '" + name + "' in library '" + scheme_.settings.library + "'");
}

void Session::add_catalog(Catalog cat) {
  auto it = std::find_if(catalogs_.begin(), catalogs_.end(), [&](const Catalog& c) { return c.name == cat.name; });
  if (it != catalogs_.end()) {
    *it = std::move(cat);
  } else {
    catalogs_.push_back(std::move(cat));
  }
}

std::vector<std::string> Session::verbs() {
  std::vector<std::string> out;
  for (const auto& [name, _] : table()) out.push_back(name);
  return out;
}

bool Session::is_mutating(const std::string& verb) {
  auto it = table().find(verb);
  return it != table().end() && it->second.mutating;
}

json Session::execute(const std::string& verb, const json& args) {
  auto it = table().find(verb);
  if (it == table().end()) fail(ErrorCode::kParseError, "unknown verb '" + verb + "'");
  const json& a = args.is_null() ? json::object() : args;
  if (!a.is_object()) fail(ErrorCode::kInvalidArgument, "arguments must be an object");
  try {
    if (it->second.preview && !commit_previews) {
      Scheme staged = scheme_;
      json result = it->second.run(*this, staged, a);
      IdSet highlight;
      for (const auto& x : result.at("preview")) highlight.insert(x.get<ObjectId>());
      result.erase("preview");
      return stage(verb, std::move(staged), std::move(highlight), std::move(result));
    }
    if (!it->second.mutating) return it->second.run(*this, scheme_, a);
    Scheme work = scheme_;
    json result = it->second.run(*this, work, a);
    result.erase("preview");
    scheme_ = std::move(work);
    ++version_;
    pending_.reset();
    return result;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad arguments: ") + e.what());
  }
}

json Session::stage(const std::string& verb, Scheme staged, IdSet highlight, json result) {
  Preview p;
  p.token = "t" + std::to_string(++token_counter_);
  p.verb = verb;
  p.staged = std::move(staged);
  p.highlight = std::move(highlight);
  p.base_version = version_;
  p.result = std::move(result);
  pending_ = std::move(p);
  return {{"token", pending_->token},
          {"preview", std::vector<ObjectId>(pending_->highlight.begin(), pending_->highlight.end())}};
}

json Session::confirm(const std::string& token) {
  if (!pending_ || pending_->token != token || pending_->base_version != version_) {
    fail(ErrorCode::kStaleToken, "preview token '" + token + "' is no longer valid");
  }
  scheme_ = std::move(pending_->staged);
  json result = std::move(pending_->result);
  pending_.reset();
  ++version_;
  return result;
}

void Session::cancel(const std::string& token) {
  if (!pending_ || pending_->token != token) fail(ErrorCode::kStaleToken, "preview token '" + token + "' is no longer valid");
  pending_.reset();
}

Drawable Session::preview_drawing(const RenderSettings& settings) const {
  if (!pending_ || pending_->base_version != version_) return render(scheme_, settings);
  return render_preview(scheme_, pending_->staged, pending_->highlight, settings);
}

namespace {

Verb mut(std::function<json(Session&, Scheme&, const json&)> fn) { return {true, false, std::move(fn)}; }
Verb query(std::function<json(Session&, Scheme&, const json&)> fn) { return {false, false, std::move(fn)}; }
Verb staged(std::function<json(Session&, Scheme&, const json&)> fn) { return {true, true, std::move(fn)}; }

Table build_table() {
  Table t;
  // ---- scheme core ----
  t["new"] = mut([](Session&, Scheme& s, const json&) {
    s = Scheme{};
    return json::object();
  });
  t["open"] = mut([](Session&, Scheme& s, const json& a) {
    s = load(str(need(a, "path")));
    return json::object();
  });
  t["add_pipe"] = mut([](Session&, Scheme& s, const json& a) {
    return json{{"id", add_pipe(s, point(need(a, "a")), point(need(a, "b")))}};
  });
  t["connect_ends"] = mut([](Session&, Scheme& s, const json& a) {
    return json{{"id", connect_ends(s, end_ref(need(a, "e1")), end_ref(need(a, "e2")))}};
  });
  t["disconnect_ends"] = mut([](Session&, Scheme& s, const json& a) {
    disconnect_ends(s, id_of(need(a, "connection")));
    return json::object();
  });
  t["integrity"] = query([](Session&, Scheme& s, const json&) {
    json out = json::array();
    for (const auto& v : integrity_check(s)) {
      out.push_back({{"kind", std::string(violation_name(v.kind))}, {"object", v.object}, {"detail", v.detail}});
    }
    return json{{"violations", out}};
  });
  t["closure"] = query([](Session&, Scheme& s, const json& a) {
    return ids(reference_closure(s, id_set(need(a, "ids"))));
  });
  t["pick"] = query([](Session&, Scheme& s, const json& a) {
    std::set<PickKind> filter;
    if (has(a, "classes")) {
      for (const auto& c : a.at("classes")) filter.insert(pick_kind_arg(c));
    } else {
      filter = {PickKind::kPipe, PickKind::kPipeEnd, PickKind::kBlock, PickKind::kDimension,
                PickKind::kText, PickKind::kDesignator, PickKind::kHeightMark};
    }
    const Projection proj = has(a, "projection") ? projection_by_name(str(a.at("projection"))) : s.settings.projection;
    json out = json::array();
    for (const auto& c : pick(s, {number(need(a, "x")), number(need(a, "y"))}, proj, filter)) {
      json ops = json::array();
      for (const auto& op : applicable_ops(s, c.target)) ops.push_back({{"verb", op.verb}, {"enabled", op.enabled}});
      json j = pick_target_json(c.target);
      j["distance"] = c.distance;
      j["ops"] = ops;
      out.push_back(j);
    }
    return json{{"candidates", out}};
  });
  t["applicable"] = query([](Session&, Scheme& s, const json& a) {
    json ops = json::array();
    for (const auto& op : applicable_ops(s, pick_target(a))) ops.push_back({{"verb", op.verb}, {"enabled", op.enabled}});
    return json{{"ops", ops}};
  });

  // ---- projection ----
  t["snap"] = query([](Session&, Scheme& s, const json& a) {
    const Point3 p = snap(s, point(need(a, "point")), number(need(a, "radius")));
    return json{{"point", {p.x, p.y, p.z}}};
  });
  t["set_projection"] = mut([](Session&, Scheme& s, const json& a) {
    set_projection(s, projection_arg(a));
    return json::object();
  });
  t["fly_around"] = query([](Session&, Scheme& s, const json& a) {
    json out = json::array();
    for (const auto& p : fly_around(s.settings.projection, number(need(a, "step")), int_of(need(a, "n")))) {
      out.push_back(projection_to_json(p));
    }
    return json{{"projections", out}};
  });

  // ---- edit ops ----
  t["sketch_line"] = mut([](Session&, Scheme& s, const json& a) {
    std::vector<Point3> pts;
    for (const auto& p : need(a, "vertices")) pts.push_back(point(p));
    return ids(sketch_line(s, pts, has(a, "snap") ? number(a.at("snap")) : 0.0));
  });
  t["insert_elbow"] = mut([](Session&, Scheme& s, const json& a) {
    return ids(insert_elbow(s, id_of(need(a, "pipe")), number(need(a, "tStart")), number(need(a, "tEnd")),
                            parse_axis_dir(str(need(a, "dir"))), number(need(a, "shift"))));
  });
  t["extend_pipe"] = mut([](Session&, Scheme& s, const json& a) {
    extend_pipe(s, end_ref(need(a, "end")), point(need(a, "point")));
    return json::object();
  });
  t["move_point"] = mut([](Session&, Scheme& s, const json& a) {
    const std::string scope = has(a, "scope") ? str(a.at("scope")) : "all";
    if (scope != "all" && scope != "only") fail(ErrorCode::kInvalidArgument, "scope is 'all' or 'only'");
    return ids(move_point(s, end_ref(need(a, "end")), point(need(a, "point")),
                          scope == "all" ? MoveScope::kAllAtPoint : MoveScope::kOnlyThis));
  });
  t["cut_pipe"] = mut([](Session&, Scheme& s, const json& a) {
    return ids(cut_pipe(s, id_of(need(a, "pipe")), number(need(a, "t"))));
  });
  t["merge_pipes"] = mut([](Session&, Scheme& s, const json& a) {
    std::optional<End> side;
    if (has(a, "side")) side = parse_end(str(a.at("side")));
    return json{{"id", merge_pipes(s, id_of(need(a, "pipe")), side)}};
  });
  t["delete_pipe"] = mut([](Session&, Scheme& s, const json& a) {
    const DeleteResult r = delete_pipe(s, id_of(need(a, "pipe")));
    return json{{"ids", std::vector<ObjectId>(r.deleted.begin(), r.deleted.end())}, {"warnings", r.warnings}};
  });
  t["delete_part"] = staged([](Session&, Scheme& s, const json& a) {
    const IdSet seed = id_set(need(a, "ids"));
    const IdSet closed = preview_delete_part(s, seed);
    const DeleteResult r = delete_part(s, seed);
    return json{{"ids", std::vector<ObjectId>(r.deleted.begin(), r.deleted.end())},
                {"warnings", r.warnings},
                {"preview", std::vector<ObjectId>(closed.begin(), closed.end())}};
  });
  t["move_part"] = mut([](Session&, Scheme& s, const json& a) {
    const MoveResult r = move_part(s, id_set(need(a, "pipes")), point(need(a, "shift")));
    return json{{"ids", std::vector<ObjectId>(r.moved.begin(), r.moved.end())}, {"warnings", r.warnings}};
  });
  t["move_branch"] = staged([](Session&, Scheme& s, const json& a) {
    const ObjectId seed = id_of(need(a, "pipe"));
    const IdSet branch = preview_move_branch(s, seed);
    const MoveResult r = move_branch(s, seed, point(need(a, "shift")));
    return json{{"ids", std::vector<ObjectId>(r.moved.begin(), r.moved.end())},
                {"warnings", r.warnings},
                {"preview", std::vector<ObjectId>(branch.begin(), branch.end())}};
  });
  t["replicate"] = staged([](Session&, Scheme& s, const json& a) {
    const auto copies = replicate(s, id_set(need(a, "ids")), point(need(a, "shift")),
                                  has(a, "count") ? int_of(a.at("count")) : 1);
    const auto all = flatten(copies);
    return json{{"ids", all}, {"preview", all}};
  });
  t["set_offset"] = mut([](Session&, Scheme& s, const json& a) {
    OffsetSpec o;
    const std::string kind = has(a, "kind") ? str(a.at("kind")) : "global";
    if (kind != "global" && kind != "local") fail(ErrorCode::kInvalidArgument, "kind is 'global' or 'local'");
    o.kind = kind == "global" ? OffsetKind::kGlobal : OffsetKind::kLocal;
    o.anchor = pipe_point(need(a, "anchor"));
    o.half_space_sign = has(a, "sign") ? int_of(a.at("sign")) : 1;
    o.paper_shift = vec2(need(a, "shift"));
    if (has(a, "broken")) {
      for (const auto& bp : a.at("broken")) o.broken_pipes.push_back(pipe_point(bp));
    }
    if (has(a, "scope")) o.scope_pipe = id_of(a.at("scope"));
    return json{{"id", set_offset(s, o)}};
  });
  t["set_level"] = mut([](Session&, Scheme& s, const json& a) {
    set_level(s, id_of(need(a, "mark")), number(need(a, "level")));
    return json::object();
  });
  t["move_scheme"] = mut([](Session&, Scheme& s, const json& a) {
    move_scheme(s, vec2(need(a, "shift")));
    return json::object();
  });
  t["set_visibility"] = mut([](Session&, Scheme& s, const json& a) {
    set_visibility(s, parse_object_class(str(need(a, "class"))), flag(need(a, "visible")));
    return json::object();
  });
  t["set_numbering"] = mut([](Session&, Scheme& s, const json& a) {
    const std::string mode = str(need(a, "mode"));
    if (mode != "auto" && mode != "manual") fail(ErrorCode::kInvalidArgument, "numbering is 'auto' or 'manual'");
    s.settings.numbering = mode == "auto" ? NumberingMode::kAuto : NumberingMode::kManual;
    return json::object();
  });
  t["set_flange_slots"] = mut([](Session&, Scheme& s, const json& a) {
    const int n = int_of(need(a, "n"));
    if (n != 4 && n != 5) fail(ErrorCode::kInvalidArgument, "flange kits have 4 or 5 positions");
    s.settings.flange_slots = n;
    return json::object();
  });
  t["set_floor_label"] = mut([](Session&, Scheme& s, const json& a) {
    s.settings.floor_label = str(need(a, "label"));
    return json::object();
  });

  // ---- symbols and blocks ----
  t["place_block"] = mut([](Session& ses, Scheme& s, const json& a) {
    const SymbolDef def = ses.symbol(str(need(a, "symbol")));
    std::vector<ObjectId> extra;
    if (has(a, "extra")) extra = id_list(a.at("extra"));
    return json{{"id", place_block(s, def, point(need(a, "at")), has(a, "snap") ? number(a.at("snap")) : 1.0,
                                   has(a, "orientation") ? int_of(a.at("orientation")) : 0, extra,
                                   has(a, "scale") ? number(a.at("scale")) : 1.0)}};
  });
  t["place_block_on_pipe"] = mut([](Session& ses, Scheme& s, const json& a) {
    const SymbolDef def = ses.symbol(str(need(a, "symbol")));
    return json{{"id", place_block_on_pipe(s, def, pipe_point(need(a, "at")),
                                           has(a, "orientation") ? int_of(a.at("orientation")) : 0,
                                           has(a, "scale") ? number(a.at("scale")) : 1.0)}};
  });
  t["variants_orientation"] = query([](Session& ses, Scheme& s, const json& a) {
    const SymbolDef& def = ses.symbol(str(need(a, "symbol")));
    std::vector<ObjectId> extra;
    if (has(a, "extra")) extra = id_list(a.at("extra"));
    const PlacementPlan plan =
        plan_placement(s, def, point(need(a, "at")), has(a, "snap") ? number(a.at("snap")) : 1.0, extra);
    json out = json::array();
    for (std::size_t i = 0; i < plan.variants.size(); ++i) {
      json v = orientation_json(plan.variants[i]);
      v["slots"] = plan.slots[i];
      out.push_back(v);
    }
    return json{{"position", {plan.position.x, plan.position.y, plan.position.z}},
                {"pipes", plan.pipes},
                {"variants", out}};
  });
  t["attach_pipe"] = mut([](Session&, Scheme& s, const json& a) {
    attach_pipe_to_block(s, id_of(need(a, "block")), id_of(need(a, "pipe")));
    return json::object();
  });
  t["replace_block"] = mut([](Session& ses, Scheme& s, const json& a) {
    const SymbolDef def = ses.symbol(str(need(a, "symbol")));
    return json{{"id", replace_block(s, id_of(need(a, "block")), def)}};
  });
  t["library_load"] = mut([](Session& ses, Scheme& s, const json& a) {
    Library lib = load_library(str(need(a, "path")));
    const std::string name = lib.name;
    ses.add_library(std::move(lib));
    s.settings.library = name;
    return json{{"library", name}};
  });
  t["library_use"] = mut([](Session& ses, Scheme& s, const json& a) {
    const std::string name = str(need(a, "name"));
    if (!ses.libraries().count(name)) fail(ErrorCode::kUnknownSymbol, "library '" + name + "' is not loaded");
    s.settings.library = name;
    return json{{"library", name}};
  });
  t["library"] = query([](Session& ses, Scheme&, const json&) {
    json libs = json::array();
    for (const auto& [name, lib] : ses.libraries()) libs.push_back(library_to_json(lib));
    return json{{"current", ses.current_library().name}, {"libraries", libs}};
  });

  // ---- annotations and specification ----
  t["variants_dimension"] = query([](Session&, Scheme& s, const json& a) {
    std::vector<DimOrigin> origins;
    for (const auto& o : need(a, "origins")) origins.push_back(origin(o));
    json out = json::array();
    for (const auto& v : enumerate_dimension_variants(s, origins)) {
      out.push_back({{"axis", std::string(axis_name(v.axis))}, {"side", v.side}});
    }
    return json{{"variants", out}};
  });
  t["add_dimension"] = mut([](Session&, Scheme& s, const json& a) {
    std::vector<DimOrigin> origins;
    for (const auto& o : need(a, "origins")) origins.push_back(origin(o));
    return json{{"id", add_chain_dimension(s, origins, parse_axis(str(need(a, "axis"))),
                                           has(a, "side") ? int_of(a.at("side")) : 1,
                                           has(a, "offset") ? number(a.at("offset")) : 10.0)}};
  });
  t["dimension_values"] = query([](Session&, Scheme& s, const json& a) {
    const ObjectId id = id_of(need(a, "dimension"));
    auto it = s.dimensions.find(id);
    if (it == s.dimensions.end()) fail(ErrorCode::kUnknownId, "no dimension with id " + std::to_string(id));
    return json{{"values", dimension_values(s, it->second)}};
  });
  t["add_text"] = mut([](Session&, Scheme& s, const json& a) {
    std::vector<LeaderTarget> targets;
    for (const auto& x : need(a, "targets")) targets.push_back(target(x));
    std::optional<Vec2> anchor;
    if (has(a, "anchor")) anchor = vec2(a.at("anchor"));
    return json{{"id", add_leader_text(s, str(need(a, "text")), targets, anchor)}};
  });
  t["change_leader_target"] = mut([](Session&, Scheme& s, const json& a) {
    change_leader_target(s, id_of(need(a, "owner")), int_of(need(a, "leader")), target(need(a, "target")));
    return json::object();
  });
  t["change_main_leader"] = mut([](Session&, Scheme& s, const json& a) {
    change_main_leader(s, id_of(need(a, "owner")), int_of(need(a, "leader")));
    return json::object();
  });
  t["add_height_mark"] = mut([](Session&, Scheme& s, const json& a) {
    std::optional<double> level;
    if (has(a, "level")) level = number(a.at("level"));
    return json{{"id", add_height_mark(s, pipe_point(need(a, "at")), level)}};
  });
  t["place_designator"] = mut([](Session&, Scheme& s, const json& a) {
    std::vector<int> numbers;
    if (has(a, "numbers")) numbers = int_list(a.at("numbers"));
    const int count = has(a, "count") ? int_of(a.at("count")) : (numbers.empty() ? 1 : static_cast<int>(numbers.size()));
    std::optional<Vec2> anchor;
    if (has(a, "anchor")) anchor = vec2(a.at("anchor"));
    const ObjectId id = place_designator(s, id_of(need(a, "target")), count, numbers, anchor);
    return json{{"id", id}, {"positions", s.designators.at(id).positions}};
  });
  t["place_flange_designator"] = mut([](Session&, Scheme& s, const json& a) {
    std::vector<int> numbers;
    if (has(a, "numbers")) numbers = int_list(a.at("numbers"));
    std::optional<Vec2> anchor;
    if (has(a, "anchor")) anchor = vec2(a.at("anchor"));
    const ObjectId id = place_flange_designator(s, id_of(need(a, "target")), numbers, anchor);
    return json{{"id", id}, {"positions", s.designators.at(id).positions}};
  });
  t["flange_kit"] = mut([](Session& ses, Scheme& s, const json& a) {
    std::vector<std::string> codes;
    for (const auto& c : need(a, "codes")) codes.push_back(str(c));
    json rows = json::object();
    for (const auto& [pos, row] : flange_kit_wizard(s, id_of(need(a, "designator")), codes, ses.catalogs())) {
      rows[std::to_string(pos)] = spec_row_json(row);
    }
    return json{{"rows", rows}};
  });
  t["spec_rows"] = query([](Session&, Scheme& s, const json& a) {
    json rows = json::array();
    for (const auto& [pos, row] : spec_rows(s, id_of(need(a, "element")))) {
      json r = spec_row_json(row);
      r["position"] = pos;
      r["sharedBy"] = std::vector<ObjectId>(elements_sharing(s, pos).begin(), elements_sharing(s, pos).end());
      rows.push_back(r);
    }
    return json{{"rows", rows}};
  });
  t["spec_set"] = mut([](Session&, Scheme& s, const json& a) {
    std::map<int, SpecRow> rows;
    for (const auto& [k, v] : need(a, "rows").items()) {
      int pos = 0;
      try {
        pos = std::stoi(k);
      } catch (const std::exception&) {
        fail(ErrorCode::kInvalidArgument, "row key '" + k + "' is not a position number");
      }
      rows[pos] = spec_row(v);
    }
    const std::string mode = has(a, "mode") ? str(a.at("mode")) : "single";
    if (mode != "single" && mode != "shared") fail(ErrorCode::kInvalidArgument, "mode is 'single' or 'shared'");
    return json{{"warnings", write_spec_rows(s, id_of(need(a, "element")), rows,
                                             mode == "single" ? SpecEditMode::kSingle : SpecEditMode::kShared)}};
  });
  t["specified_part"] = query([](Session&, Scheme& s, const json&) {
    const SpecifiedPart p = specified_part(s);
    return json{{"specified", std::vector<ObjectId>(p.specified.begin(), p.specified.end())},
                {"unassigned", std::vector<ObjectId>(p.unassigned.begin(), p.unassigned.end())}};
  });
  t["pipe_length"] = query([](Session&, Scheme& s, const json& a) {
    LengthAccumulator acc(s);
    json running = json::array();
    for (ObjectId id : id_list(need(a, "pipes"))) running.push_back(acc.add(id));
    return json{{"total", acc.total()}, {"running", running}};
  });
  t["import_grid"] = mut([](Session&, Scheme& s, const json& a) {
    if (has(a, "text")) {
      std::istringstream in(str(a.at("text")));
      return json{{"id", import_construction_grid(s, in)}};
    }
    const std::string path = str(need(a, "path"));
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIoError, "cannot open '" + path + "'");
    return json{{"id", import_construction_grid(s, in)}};
  });
  t["catalog_load"] = query([](Session& ses, Scheme&, const json& a) {
    Catalog cat = load_catalog(str(need(a, "path")));
    const std::string name = cat.name;
    const std::size_t n = cat.rows.size();
    ses.add_catalog(std::move(cat));
    return json{{"catalog", name}, {"rows", n}};
  });
  t["catalogs"] = query([](Session& ses, Scheme&, const json&) {
    json out = json::array();
    for (const auto& c : ses.catalogs()) {
      json rows = json::array();
      for (const auto& r : c.rows) {
        rows.push_back({{"code", r.code}, {"name", r.name}, {"dn", r.dn}, {"pn", r.pn}, {"unit", r.unit}, {"mass", r.mass}});
      }
      out.push_back({{"name", c.name}, {"rows", rows}});
    }
    return json{{"catalogs", out}};
  });
  t["export_spec"] = query([](Session&, Scheme& s, const json& a) {
    std::ostringstream out;
    export_spec_csv(s, out);
    if (has(a, "path")) {
      std::ofstream f(str(a.at("path")), std::ios::binary | std::ios::trunc);
      if (!f) fail(ErrorCode::kIoError, "cannot write '" + str(a.at("path")) + "'");
      f << out.str();
      return json{{"path", a.at("path")}};
    }
    return json{{"csv", out.str()}};
  });

  // ---- documents and drawings ----
  t["save"] = query([](Session&, Scheme& s, const json& a) {
    save(s, str(need(a, "path")));
    return json{{"path", a.at("path")}};
  });
  t["render"] = query([](Session&, Scheme& s, const json& a) {
    const std::string svg = emit_svg(render(s, render_settings(a)), render_settings(a));
    if (has(a, "path")) {
      std::ofstream f(str(a.at("path")), std::ios::binary | std::ios::trunc);
      if (!f) fail(ErrorCode::kIoError, "cannot write '" + str(a.at("path")) + "'");
      f << svg;
      return json{{"path", a.at("path")}};
    }
    return json{{"svg", svg}};
  });
  return t;
}

const Table& table() {
  static const Table t = build_table();
  return t;
}

}  // namespace

}  // namespace axon
