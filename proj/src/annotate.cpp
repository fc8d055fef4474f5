#include "axon/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "axon/core.hpp"
#include "axon/error.hpp"
#include "axon/format.hpp"
#include "csv.hpp"

namespace axon {

namespace {

constexpr Vec2 kDefaultAnchorOffset{10.0, 10.0};

void check_origin(const Scheme& s, const DimOrigin& o) {
  if (const auto* e = std::get_if<PipeEndRef>(&o)) {
    s.pipe(e->pipe);
    return;
  }
  const auto& r = std::get<BlockPointRef>(o);
  const BlockInstance& b = s.block(r.block);
  if (r.slot < 0 || r.slot >= attachment_arity(s.symbol_of(b).attachment)) {
    fail(ErrorCode::kInvalidArgument, "block " + std::to_string(r.block) + " has no slot " + std::to_string(r.slot));
  }
}

void check_target(const Scheme& s, const LeaderTarget& t) {
  if (const auto* pp = std::get_if<PipePoint>(&t)) {
    s.pipe(pp->pipe);
    if (!(pp->t >= 0.0 && pp->t <= 1.0)) fail(ErrorCode::kBadParameter, "leader parameter must lie in [0, 1]");
  } else {
    s.block(std::get<BlockRef>(t).block);
  }
}

Vec2 default_anchor(const Scheme& s, const LeaderTarget& t) {
  return project(target_point(s, t), s.settings.projection) + kDefaultAnchorOffset;
}

// Leader list and main index of a text or designator.
std::pair<std::vector<Leader>*, int*> leaders_of(Scheme& s, ObjectId owner) {
  if (auto it = s.texts.find(owner); it != s.texts.end()) return {&it->second.leaders, &it->second.main_leader};
  if (auto it = s.designators.find(owner); it != s.designators.end()) {
    return {&it->second.leaders, &it->second.main_leader};
  }
  fail(ErrorCode::kUnknownId, "no text or designator with id " + std::to_string(owner));
}

const std::optional<ObjectId>& designator_slot(const Scheme& s, ObjectId element) {
  if (auto it = s.pipes.find(element); it != s.pipes.end()) return it->second.designator;
  if (auto it = s.blocks.find(element); it != s.blocks.end()) return it->second.designator;
  fail(ErrorCode::kUnknownId, "no pipe or block with id " + std::to_string(element));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::vector<DimensionVariant> enumerate_dimension_variants(const Scheme& scheme, const std::vector<DimOrigin>& origins) {
  if (origins.size() < 2) fail(ErrorCode::kTooFewOrigins, "a chain dimension needs at least two origins");
  std::vector<Point3> pts;
  for (const auto& o : origins) {
    check_origin(scheme, o);
    pts.push_back(origin_point(scheme, o));
  }
  std::vector<DimensionVariant> out;
  for (Axis axis : {Axis::kX, Axis::kY, Axis::kZ}) {
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [axis](Point3 a, Point3 b) {
      return component(a, axis) < component(b, axis);
    });
    if (component(*hi, axis) - component(*lo, axis) > kEpsilon) {
      out.push_back({axis, 1});
      out.push_back({axis, -1});
    }
  }
  return out;
}

ObjectId add_chain_dimension(Scheme& scheme, std::vector<DimOrigin> origins, Axis axis, int side, double offset) {
  const auto variants = enumerate_dimension_variants(scheme, origins);
  if (std::find(variants.begin(), variants.end(), DimensionVariant{axis, side}) == variants.end()) {
    fail(ErrorCode::kVariantNotAdmissible,
         "axis " + std::string(axis_name(axis)) + " side " + std::to_string(side) + " is not admissible");
  }
  if (!(offset > 0.0) || !std::isfinite(offset)) fail(ErrorCode::kInvalidArgument, "offset must be positive");
  std::stable_sort(origins.begin(), origins.end(), [&](const DimOrigin& a, const DimOrigin& b) {
    return component(origin_point(scheme, a), axis) < component(origin_point(scheme, b), axis);
  });
  for (std::size_t i = 1; i < origins.size(); ++i) {
    const double d = component(origin_point(scheme, origins[i]), axis) -
                     component(origin_point(scheme, origins[i - 1]), axis);
    if (d <= kEpsilon) fail(ErrorCode::kInvalidArgument, "two origins are level along the axis");
  }
  ChainDimension dim;
  dim.id = scheme.allocate_id();
  dim.origins = std::move(origins);
  dim.axis = axis;
  dim.side = side;
  dim.offset = offset;
  scheme.dimensions.emplace(dim.id, dim);
  return dim.id;
}

std::vector<double> dimension_values(const Scheme& scheme, const ChainDimension& dim) {
  std::vector<double> coords;
  for (const auto& o : dim.origins) coords.push_back(component(origin_point(scheme, o), dim.axis));
  std::sort(coords.begin(), coords.end());
  std::vector<double> out;
  for (std::size_t i = 1; i < coords.size(); ++i) out.push_back(coords[i] - coords[i - 1]);
  return out;
}

ObjectId add_leader_text(Scheme& scheme, const std::string& text, const std::vector<LeaderTarget>& targets,
                         std::optional<Vec2> anchor) {
  if (targets.empty()) fail(ErrorCode::kInvalidArgument, "a text needs at least one leader");
  for (const auto& t : targets) check_target(scheme, t);
  const Vec2 at = anchor.value_or(default_anchor(scheme, targets.front()));
  TextAnnotation ta;
  ta.id = scheme.allocate_id();
  ta.text = text;
  for (const auto& t : targets) ta.leaders.push_back({t, at});
  scheme.texts.emplace(ta.id, ta);
  return ta.id;
}

void change_leader_target(Scheme& scheme, ObjectId owner, int leader, const LeaderTarget& target) {
  auto [leaders, main] = leaders_of(scheme, owner);
  (void)main;
  if (leader < 0 || leader >= static_cast<int>(leaders->size())) {
    fail(ErrorCode::kInvalidArgument, "no leader " + std::to_string(leader));
  }
  check_target(scheme, target);
  (*leaders)[leader].target = target;
}

void change_main_leader(Scheme& scheme, ObjectId owner, int leader) {
  auto [leaders, main] = leaders_of(scheme, owner);
  if (leaders->size() < 2) fail(ErrorCode::kOnlyOneLeader, "there is only one leader");
  if (leader < 0 || leader >= static_cast<int>(leaders->size())) {
    fail(ErrorCode::kInvalidArgument, "no leader " + std::to_string(leader));
  }
  if (leader == *main) fail(ErrorCode::kAlreadyMain, "leader " + std::to_string(leader) + " is already main");
  *main = leader;
}

ObjectId add_height_mark(Scheme& scheme, PipePoint at, std::optional<double> level) {
  const Pipe& p = scheme.pipe(at.pipe);
  if (!(at.t >= 0.0 && at.t <= 1.0)) fail(ErrorCode::kBadParameter, "mark parameter must lie in [0, 1]");
  if (level && !std::isfinite(*level)) fail(ErrorCode::kInvalidArgument, "level must be finite");
  HeightMark h;
  h.id = scheme.allocate_id();
  h.at = at;
  h.level = level.value_or(p.at(at.t).z / 1000.0);
  scheme.height_marks.emplace(h.id, h);
  return h.id;
}

int next_position_number(const Scheme& scheme) {
  int top = 0;
  for (const auto& [_, pd] : scheme.designators) {
    for (int n : pd.positions) top = std::max(top, n);
  }
  if (!scheme.spec.empty()) top = std::max(top, scheme.spec.rbegin()->first);
  return top + 1;
}

ObjectId place_designator(Scheme& scheme, ObjectId target, int count, const std::vector<int>& numbers,
                          std::optional<Vec2> anchor) {
  if (designator_slot(scheme, target)) {
    fail(ErrorCode::kDesignatorConflict, "element " + std::to_string(target) + " already has a designator");
  }
  if (count < 1 || count > 5) fail(ErrorCode::kInvalidArgument, "a designator holds 1 to 5 positions");
  std::vector<int> positions = numbers;
  if (positions.empty()) {
    if (scheme.settings.numbering == NumberingMode::kManual) {
      fail(ErrorCode::kInvalidArgument, "manual numbering needs explicit numbers");
    }
    const int first = next_position_number(scheme);
    for (int k = 0; k < count; ++k) positions.push_back(first + k);
  } else {
    if (static_cast<int>(positions.size()) != count) {
      fail(ErrorCode::kWrongPositionCount, "expected " + std::to_string(count) + " numbers");
    }
    std::set<int> seen;
    for (int n : positions) {
      if (n < 1) fail(ErrorCode::kInvalidArgument, "position numbers are positive");
      if (!seen.insert(n).second) fail(ErrorCode::kDuplicateNumber, "number " + std::to_string(n) + " repeats");
    }
  }
  const LeaderTarget lt = scheme.pipes.count(target) ? LeaderTarget{PipePoint{target, 0.5}} : LeaderTarget{BlockRef{target}};
  PositionDesignator pd;
  pd.id = scheme.allocate_id();
  pd.positions = std::move(positions);
  pd.target = target;
  pd.leaders.push_back({lt, anchor.value_or(default_anchor(scheme, lt))});
  scheme.designators.emplace(pd.id, pd);
  if (auto it = scheme.pipes.find(target); it != scheme.pipes.end()) {
    it->second.designator = pd.id;
  } else {
    scheme.block(target).designator = pd.id;
  }
  return pd.id;
}

ObjectId place_flange_designator(Scheme& scheme, ObjectId target, const std::vector<int>& numbers,
                                 std::optional<Vec2> anchor) {
  const int n = scheme.settings.flange_slots;
  if (n != 4 && n != 5) fail(ErrorCode::kInvalidArgument, "flange kit size must be 4 or 5");
  return place_designator(scheme, target, n, numbers, anchor);
}

const CatalogRow* Catalog::find(const std::string& code) const {
  for (const auto& r : rows) {
    if (r.code == code) return &r;
  }
  return nullptr;
}

Catalog parse_catalog(std::istream& in, const std::string& name) {
  int lines = 0;
  const auto header = csv::read_record(in, lines);
  if (!header) fail(ErrorCode::kParseError, "catalog is empty", 1);
  static const char* kColumns[] = {"code", "name", "dn", "pn", "unit", "mass"};
  int col[6];
  for (int k = 0; k < 6; ++k) {
    auto it = std::find_if(header->begin(), header->end(), [&](const std::string& h) { return trim(h) == kColumns[k]; });
    if (it == header->end()) fail(ErrorCode::kParseError, std::string("missing column '") + kColumns[k] + "'", 1);
    col[k] = static_cast<int>(it - header->begin());
  }
  Catalog cat;
  cat.name = name;
  std::set<std::string> codes;
  while (true) {
    const int line = lines + 1;
    auto rec = csv::read_record(in, lines);
    if (!rec) break;
    if (rec->size() == 1 && trim((*rec)[0]).empty()) continue;
    if (rec->size() != header->size()) {
      fail(ErrorCode::kParseError,
           "expected " + std::to_string(header->size()) + " fields, got " + std::to_string(rec->size()), line);
    }
    CatalogRow row{trim((*rec)[col[0]]), trim((*rec)[col[1]]), trim((*rec)[col[2]]),
                   trim((*rec)[col[3]]), trim((*rec)[col[4]]), trim((*rec)[col[5]])};
    if (row.code.empty()) fail(ErrorCode::kParseError, "empty code", line);
    if (!codes.insert(row.code).second) {
      fail(ErrorCode::kDuplicateCode, "code '" + row.code + "' appears twice", line);
    }
    cat.rows.push_back(std::move(row));
  }
  return cat;
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::string name = path.substr(path.find_last_of("/\\") + 1);
  if (auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name.erase(dot);
  return parse_catalog(in, name);
}

std::map<int, SpecRow> flange_kit_wizard(Scheme& scheme, ObjectId designator, const std::vector<std::string>& codes,
                                         const std::vector<Catalog>& catalogs) {
  auto it = scheme.designators.find(designator);
  if (it == scheme.designators.end()) fail(ErrorCode::kUnknownId, "no designator with id " + std::to_string(designator));
  const auto& positions = it->second.positions;
  if (positions.size() != 4 && positions.size() != 5) {
    fail(ErrorCode::kWrongPositionCount, "flange kits have 4 or 5 positions, this one has " +
                                             std::to_string(positions.size()));
  }
  if (codes.size() != positions.size()) {
    fail(ErrorCode::kWrongPositionCount, "one code per position is required");
  }
  std::map<int, SpecRow> delta;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const CatalogRow* found = nullptr;
    const Catalog* from = nullptr;
    for (const auto& cat : catalogs) {
      if ((found = cat.find(codes[k]))) {
        from = &cat;
        break;
      }
    }
    if (!found) fail(ErrorCode::kUnknownCatalogCode, "no catalog lists code '" + codes[k] + "'");
    SpecRow row = scheme.spec.count(positions[k]) ? scheme.spec.at(positions[k]) : SpecRow{};
    row.name = found->name;
    row.code = found->code;
    row.unit = found->unit;
    row.type_brand.clear();
    if (!found->dn.empty()) row.type_brand += "DN" + found->dn;
    if (!found->pn.empty()) row.type_brand += (row.type_brand.empty() ? "PN" : " PN") + found->pn;
    row.catalog_ref = from->name;
    row.extra["role"] = kFlangeRoles[k];
    if (!found->mass.empty()) row.extra["mass"] = found->mass;
    delta[positions[k]] = row;
  }
  for (const auto& [pos, row] : delta) scheme.spec[pos] = row;
  return delta;
}

std::vector<std::pair<int, SpecRow>> spec_rows(const Scheme& scheme, ObjectId element) {
  const auto& d = designator_slot(scheme, element);
  if (!d) fail(ErrorCode::kNoDesignator, "element " + std::to_string(element) + " has no position designator");
  std::vector<std::pair<int, SpecRow>> out;
  for (int n : scheme.designators.at(*d).positions) {
    auto it = scheme.spec.find(n);
    out.emplace_back(n, it == scheme.spec.end() ? SpecRow{} : it->second);
  }
  return out;
}

std::vector<std::string> write_spec_rows(Scheme& scheme, ObjectId element, const std::map<int, SpecRow>& rows,
                                         SpecEditMode mode) {
  const auto current = spec_rows(scheme, element);
  std::vector<std::string> warnings;
  for (const auto& [pos, _] : rows) {
    const bool own = std::any_of(current.begin(), current.end(), [pos = pos](const auto& r) { return r.first == pos; });
    if (!own) fail(ErrorCode::kInvalidArgument, "position " + std::to_string(pos) + " does not belong to the element");
  }
  for (const auto& [pos, row] : rows) {
    if (row.quantity && *row.quantity < 0.0) fail(ErrorCode::kInvalidArgument, "quantity must be non-negative");
  }
  for (const auto& [pos, row] : rows) {
    SpecRow next = row;
    if (mode == SpecEditMode::kSingle) {
      auto it = scheme.spec.find(pos);
      const std::optional<double> kept = it == scheme.spec.end() ? std::nullopt : it->second.quantity;
      if (row.quantity != kept) {
        warnings.push_back("quantity of position " + std::to_string(pos) + " ignored in single-element edit");
      }
      next.quantity = kept;
    }
    scheme.spec[pos] = next;
  }
  return warnings;
}

IdSet elements_sharing(const Scheme& scheme, int position) {
  IdSet out;
  for (const auto& [_, pd] : scheme.designators) {
    if (std::find(pd.positions.begin(), pd.positions.end(), position) != pd.positions.end()) out.insert(pd.target);
  }
  return out;
}

SpecifiedPart specified_part(const Scheme& scheme) {
  SpecifiedPart out;
  for (const auto& [_, pd] : scheme.designators) {
    out.specified.insert(pd.target);
    for (int n : pd.positions) {
      auto it = scheme.spec.find(n);
      if (it == scheme.spec.end() || it->second.unassigned()) out.unassigned.insert(pd.target);
    }
  }
  return out;
}

double position_quantity(const Scheme& scheme, int position) {
  if (auto it = scheme.spec.find(position); it != scheme.spec.end() && it->second.quantity) {
    return *it->second.quantity;
  }
  double q = 0.0;
  for (ObjectId id : elements_sharing(scheme, position)) {
    if (auto p = scheme.pipes.find(id); p != scheme.pipes.end()) {
      q += p->second.length() / 1000.0;
    } else {
      q += 1.0;
    }
  }
  return q;
}

void export_spec_csv(const Scheme& scheme, std::ostream& out) {
  std::set<int> positions;
  for (const auto& [pos, _] : scheme.spec) positions.insert(pos);
  for (const auto& [_, pd] : scheme.designators) positions.insert(pd.positions.begin(), pd.positions.end());
  out << "position,name,typeBrand,code,unit,quantity\n";
  for (int pos : positions) {
    auto it = scheme.spec.find(pos);
    const SpecRow row = it == scheme.spec.end() ? SpecRow{} : it->second;
    out << pos << ',' << csv::quote(row.name) << ',' << csv::quote(row.type_brand) << ',' << csv::quote(row.code)
        << ',' << csv::quote(row.unit) << ',' << format_trimmed(position_quantity(scheme, pos), 3) << '\n';
  }
}

double pipe_length_total(const Scheme& scheme, const IdSet& pipes) {
  double total = 0.0;
  for (ObjectId id : pipes) total += scheme.pipe(id).length();
  return total;
}

double LengthAccumulator::add(ObjectId pipe) {
  const double len = scheme_.pipe(pipe).length();
  if (seen_.insert(pipe).second) total_ += len;
  return total_;
}

ConstructionGrid parse_grid(std::istream& in) {
  ConstructionGrid grid;
  std::set<std::string> labels;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    const auto tab = text.find('\t');
    if (tab == std::string::npos) fail(ErrorCode::kParseError, "expected label<TAB>offset", line);
    const std::string label = trim(text.substr(0, tab));
    const std::string value = trim(text.substr(tab + 1));
    if (label.empty()) fail(ErrorCode::kParseError, "empty label", line);
    GridAxis axis;
    axis.label = label;
    const auto lead = static_cast<unsigned char>(label[0]);
    if (std::isdigit(lead)) {
      axis.family = GridFamily::kNumbers;
    } else if (std::isalpha(lead) || lead >= 0x80) {
      axis.family = GridFamily::kLetters;
    } else {
      fail(ErrorCode::kParseError, "label '" + label + "' is neither a letter nor a number", line);
    }
    std::size_t used = 0;
    try {
      axis.offset = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(axis.offset)) {
      fail(ErrorCode::kParseError, "bad offset '" + value + "'", line);
    }
    if (!labels.insert(label).second) fail(ErrorCode::kParseError, "duplicate label '" + label + "'", line);
    grid.axes.push_back(std::move(axis));
  }
  if (grid.axes.empty()) fail(ErrorCode::kParseError, "grid file has no axes", line);
  return grid;
}

ObjectId import_construction_grid(Scheme& scheme, std::istream& in) {
  ConstructionGrid grid = parse_grid(in);
  grid.id = scheme.allocate_id();
  scheme.grids.emplace(grid.id, grid);
  return grid.id;
}

}  // namespace axon
