#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "axon/scheme.hpp"

namespace axon {

// ---- chain dimensions ----

struct DimensionVariant {
  Axis axis = Axis::kX;
  int side = 1;

  friend bool operator==(const DimensionVariant&, const DimensionVariant&) = default;
};

// Axes along which the origins are not all level, each with side +1 then -1.
// Throws TooFewOrigins.
std::vector<DimensionVariant> enumerate_dimension_variants(const Scheme& scheme, const std::vector<DimOrigin>& origins);

// Origins are stored sorted along the axis. Throws TooFewOrigins,
// VariantNotAdmissible, InvalidArgument when two origins are level.
ObjectId add_chain_dimension(Scheme& scheme, std::vector<DimOrigin> origins, Axis axis, int side,
                             double offset = 10.0);

// Distances between consecutive origins along the axis, model mm.
std::vector<double> dimension_values(const Scheme& scheme, const ChainDimension& dim);

// ---- leader texts ----

// Without an anchor the text sits 10 mm up and right of the first target.
ObjectId add_leader_text(Scheme& scheme, const std::string& text, const std::vector<LeaderTarget>& targets,
                         std::optional<Vec2> anchor = std::nullopt);

// Works on texts and position designators alike.
void change_leader_target(Scheme& scheme, ObjectId owner, int leader, const LeaderTarget& target);
// Throws OnlyOneLeader, AlreadyMain.
void change_main_leader(Scheme& scheme, ObjectId owner, int leader);

// ---- height marks ----

// Level defaults to the elevation of the point, in meters.
ObjectId add_height_mark(Scheme& scheme, PipePoint at, std::optional<double> level = std::nullopt);

// ---- position designators ----

// Next number after every number used by a designator or a spec row.
int next_position_number(const Scheme& scheme);

// count numbers, either the manual list or consecutive from the next free
// one. Throws DuplicateNumber, DesignatorConflict, InvalidArgument.
ObjectId place_designator(Scheme& scheme, ObjectId target, int count = 1, const std::vector<int>& numbers = {},
                          std::optional<Vec2> anchor = std::nullopt);

// Designator with the configured flange kit size (4 or 5).
ObjectId place_flange_designator(Scheme& scheme, ObjectId target, const std::vector<int>& numbers = {},
                                 std::optional<Vec2> anchor = std::nullopt);

// ---- catalogs and specification ----

struct CatalogRow {
  std::string code;
  std::string name;
  std::string dn;
  std::string pn;
  std::string unit;
  std::string mass;

  friend bool operator==(const CatalogRow&, const CatalogRow&) = default;
};

struct Catalog {
  std::string name;
  std::vector<CatalogRow> rows;

  const CatalogRow* find(const std::string& code) const;
};

// CSV with header code,name,dn,pn,unit,mass in any column order.
// Throws ParseError, DuplicateCode.
Catalog parse_catalog(std::istream& in, const std::string& name);
Catalog load_catalog(const std::string& path);

// Fills one spec row per designator slot from the catalogs, all or nothing.
// Throws WrongPositionCount, UnknownCatalogCode.
std::map<int, SpecRow> flange_kit_wizard(Scheme& scheme, ObjectId designator, const std::vector<std::string>& codes,
                                         const std::vector<Catalog>& catalogs);

// Rows for the positions of a pipe or block, missing rows empty.
// Throws NoDesignator.
std::vector<std::pair<int, SpecRow>> spec_rows(const Scheme& scheme, ObjectId element);

enum class SpecEditMode { kSingle, kShared };

// Writes rows back for the element's positions. Single-element edits leave
// quantity alone and warn when it was changed. Returns warnings.
std::vector<std::string> write_spec_rows(Scheme& scheme, ObjectId element, const std::map<int, SpecRow>& rows,
                                         SpecEditMode mode = SpecEditMode::kSingle);

// Pipes and blocks whose designator lists the position.
IdSet elements_sharing(const Scheme& scheme, int position);

struct SpecifiedPart {
  IdSet specified;
  IdSet unassigned;
};

SpecifiedPart specified_part(const Scheme& scheme);

// Explicit row quantity, or else summed pipe length in meters and block count.
double position_quantity(const Scheme& scheme, int position);

// CSV columns position,name,typeBrand,code,unit,quantity.
void export_spec_csv(const Scheme& scheme, std::ostream& out);

// ---- lengths ----

double pipe_length_total(const Scheme& scheme, const IdSet& pipes);

// Running total shown while pipes are being picked.
class LengthAccumulator {
 public:
  explicit LengthAccumulator(const Scheme& scheme) : scheme_(scheme) {}
  // Throws UnknownId. Adding a pipe twice does not count it twice.
  double add(ObjectId pipe);
  double total() const { return total_; }

 private:
  const Scheme& scheme_;
  IdSet seen_;
  double total_ = 0.0;
};

// ---- construction grid ----

// Lines "label<TAB>offset-mm"; letter labels give y lines, digit labels x
// lines. Blank lines and # comments are skipped. Throws ParseError.
ConstructionGrid parse_grid(std::istream& in);
ObjectId import_construction_grid(Scheme& scheme, std::istream& in);

}  // namespace axon
