#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axon/annotate.hpp"
#include "axon/persistence.hpp"
#include "axon/render.hpp"
#include "axon/scheme.hpp"

namespace axon {

// Staged result of a two-phase operation awaiting confirmation.
struct Preview {
  std::string token;
  std::string verb;
  Scheme staged;
  IdSet highlight;
  std::uint64_t base_version = 0;
  nlohmann::json result;
};

// Open document plus the libraries, catalogs and pending preview around it.
// Every operation, whether from a script, the service or Python, goes
// through execute.
class Session {
 public:
  // Loads the builtin library and every *.json library in AXON_LIBRARY_PATH.
  Session();
  explicit Session(Scheme scheme);

  const Scheme& scheme() const { return scheme_; }
  void reset(Scheme scheme);
  std::uint64_t version() const { return version_; }

  // Args as a JSON object. Preview verbs stage and return a token unless
  // commit_previews is set. Throws Error.
  nlohmann::json execute(const std::string& verb, const nlohmann::json& args);
  // Throws StaleToken.
  nlohmann::json confirm(const std::string& token);
  void cancel(const std::string& token);
  const std::optional<Preview>& pending() const { return pending_; }
  Drawable preview_drawing(const RenderSettings& settings = {}) const;

  bool commit_previews = false;

  void add_library(Library lib);
  const std::map<std::string, Library>& libraries() const { return libraries_; }
  const Library& current_library() const;
  // Current library first, then definitions stored in the document.
  const SymbolDef& symbol(const std::string& name) const;

  void add_catalog(Catalog cat);
  const std::vector<Catalog>& catalogs() const { return catalogs_; }

  const std::vector<std::string>& load_warnings() const { return load_warnings_; }

  static std::vector<std::string> verbs();
  static bool is_mutating(const std::string& verb);

 private:
  nlohmann::json stage(const std::string& verb, Scheme staged, IdSet highlight, nlohmann::json result);

  Scheme scheme_;
  std::uint64_t version_ = 0;
  std::uint64_t token_counter_ = 0;
  std::optional<Preview> pending_;
  std::map<std::string, Library> libraries_;
  std::vector<Catalog> catalogs_;
  std::vector<std::string> load_warnings_;
};

struct TranscriptEntry {
  int line = 0;
  std::string verb;
  nlohmann::json result;
};

// One command per line: `[name =] verb arg... [key=value...]  # comment`.
// Result ids are bound to name and referenced as $name or $name[i].
// Stops at the first failing line with an Error carrying its line number;
// earlier lines stay applied.
std::vector<TranscriptEntry> run_script(Session& session, std::istream& in);
std::vector<TranscriptEntry> run_script_file(Session& session, const std::string& path);

std::string format_transcript(const std::vector<TranscriptEntry>& entries);

}  // namespace axon
