#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "axon/error.hpp"
#include "axon/session.hpp"

namespace axon {

using nlohmann::json;

namespace {

enum class ArgType { kPoint, kVec2, kId, kIds, kEnd, kPipePoint, kPipePoints, kTarget, kOrigin, kNumber, kInt, kInts, kString, kBool, kJson };

struct Param {
  std::string key;
  ArgType type;
  bool optional = false;
  bool variadic = false;
};

struct Signature {
  std::vector<Param> positional;
  std::map<std::string, ArgType> keywords;
};

ArgType type_named(const std::string& name) {
  static const std::map<std::string, ArgType> names = {
      {"point", ArgType::kPoint},   {"vec2", ArgType::kVec2},     {"id", ArgType::kId},
      {"ids", ArgType::kIds},       {"end", ArgType::kEnd},       {"pipept", ArgType::kPipePoint},
      {"pipepts", ArgType::kPipePoints}, {"target", ArgType::kTarget}, {"origin", ArgType::kOrigin},
      {"num", ArgType::kNumber},    {"int", ArgType::kInt},       {"ints", ArgType::kInts},
      {"str", ArgType::kString},    {"bool", ArgType::kBool},     {"json", ArgType::kJson}};
  return names.at(name);
}

// "a:point b:point? c:origin... | snap:num scope:str"
Signature sig(const std::string& text) {
  Signature s;
  std::istringstream in(text);
  std::string word;
  bool keywords = false;
  while (in >> word) {
    if (word == "|") {
      keywords = true;
      continue;
    }
    const auto colon = word.find(':');
    Param p;
    p.key = word.substr(0, colon);
    std::string type = word.substr(colon + 1);
    if (type.size() > 3 && type.compare(type.size() - 3, 3, "...") == 0) {
      p.variadic = true;
      type.resize(type.size() - 3);
    } else if (!type.empty() && type.back() == '?') {
      p.optional = true;
      type.pop_back();
    }
    p.type = type_named(type);
    if (keywords) {
      s.keywords[p.key] = p.type;
    } else {
      s.positional.push_back(p);
    }
  }
  return s;
}

const std::map<std::string, Signature>& signatures() {
  static const std::map<std::string, Signature> table = {
      {"new", sig("")},
      {"open", sig("path:str")},
      {"add_pipe", sig("a:point b:point")},
      {"connect_ends", sig("e1:end e2:end")},
      {"disconnect_ends", sig("connection:id")},
      {"integrity", sig("")},
      {"closure", sig("ids:ids")},
      {"pick", sig("x:num y:num | projection:str classes:json")},
      {"applicable", sig("kind:str id:id | end:str")},
      {"snap", sig("point:point radius:num")},
      {"set_projection", sig("name:str? | ex:vec2 ey:vec2 ez:vec2 label:str")},
      {"fly_around", sig("step:num n:int")},
      {"sketch_line", sig("vertices:point... | snap:num")},
      {"insert_elbow", sig("pipe:id tStart:num tEnd:num dir:str shift:num")},
      {"extend_pipe", sig("end:end point:point")},
      {"move_point", sig("end:end point:point | scope:str")},
      {"cut_pipe", sig("pipe:id t:num")},
      {"merge_pipes", sig("pipe:id | side:str")},
      {"delete_pipe", sig("pipe:id")},
      {"delete_part", sig("ids:ids")},
      {"move_part", sig("pipes:ids shift:point")},
      {"move_branch", sig("pipe:id shift:point")},
      {"replicate", sig("ids:ids shift:point count:int?")},
      {"set_offset", sig("kind:str anchor:pipept shift:vec2 | sign:int broken:pipepts scope:id")},
      {"set_level", sig("mark:id level:num")},
      {"move_scheme", sig("shift:vec2")},
      {"set_visibility", sig("class:str visible:bool")},
      {"set_numbering", sig("mode:str")},
      {"set_flange_slots", sig("n:int")},
      {"set_floor_label", sig("label:str")},
      {"place_block", sig("symbol:str at:point | snap:num orientation:int extra:ids scale:num")},
      {"place_block_on_pipe", sig("symbol:str at:pipept | orientation:int scale:num")},
      {"variants_orientation", sig("symbol:str at:point | snap:num extra:ids")},
      {"attach_pipe", sig("block:id pipe:id")},
      {"replace_block", sig("block:id symbol:str")},
      {"library_load", sig("path:str")},
      {"library_use", sig("name:str")},
      {"library", sig("")},
      {"variants_dimension", sig("origins:origin...")},
      {"add_dimension", sig("axis:str origins:origin... | side:int offset:num")},
      {"dimension_values", sig("dimension:id")},
      {"add_text", sig("text:str targets:target... | anchor:vec2")},
      {"change_leader_target", sig("owner:id leader:int target:target")},
      {"change_main_leader", sig("owner:id leader:int")},
      {"add_height_mark", sig("at:pipept level:num?")},
      {"place_designator", sig("target:id | count:int numbers:ints anchor:vec2")},
      {"place_flange_designator", sig("target:id | numbers:ints anchor:vec2")},
      {"flange_kit", sig("designator:id codes:str...")},
      {"spec_rows", sig("element:id")},
      {"spec_set", sig("element:id rows:json | mode:str")},
      {"specified_part", sig("")},
      {"pipe_length", sig("pipes:ids")},
      {"import_grid", sig("path:str? | text:str")},
      {"catalog_load", sig("path:str")},
      {"catalogs", sig("")},
      {"export_spec", sig("| path:str")},
      {"save", sig("path:str")},
      {"render", sig("| path:str projection:str glyph:bool floorLabel:str")},
  };
  return table;
}

struct Token {
  std::string text;
  bool quoted = false;
  std::size_t quote_start = std::string::npos;
};

std::vector<Token> tokenize(const std::string& line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;
    Token tok;
    // A token may mix bare text and quoted runs, as in key="a b".
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') {
      const char q = line[i];
      if (q == '"' || q == '\'') {
        if (!tok.quoted) tok.quote_start = tok.text.size();
        tok.quoted = true;
        ++i;
        bool closed = false;
        while (i < line.size()) {
          if (line[i] == '\\' && q == '"' && i + 1 < line.size()) {
            const char e = line[i + 1];
            tok.text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            i += 2;
            continue;
          }
          if (line[i] == q) {
            closed = true;
            ++i;
            break;
          }
          tok.text += line[i++];
        }
        if (!closed) fail(ErrorCode::kParseError, "unterminated string", lineno);
      } else {
        tok.text += line[i++];
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

using Bindings = std::map<std::string, std::vector<ObjectId>>;

class ArgParser {
 public:
  ArgParser(const Bindings& bindings, int line) : bindings_(bindings), line_(line) {}

  json parse(ArgType type, const std::string& text) const {
    switch (type) {
      case ArgType::kPoint: return numbers(text, 3);
      case ArgType::kVec2: return numbers(text, 2);
      case ArgType::kId: return id(text);
      case ArgType::kIds: {
        json out = json::array();
        for (const auto& part : split(text, ',')) {
          if (part.empty()) bad("empty id in list '" + text + "'");
          if (part[0] == '$' && part.find('[') == std::string::npos) {
            for (ObjectId x : bound(part.substr(1))) out.push_back(x);
          } else {
            out.push_back(id(part));
          }
        }
        return out;
      }
      case ArgType::kEnd: {
        const auto colon = text.rfind(':');
        if (colon == std::string::npos) bad("expected pipe:end, got '" + text + "'");
        const std::string e = text.substr(colon + 1);
        if (e != "A" && e != "B") bad("pipe end is A or B, got '" + e + "'");
        return json{{"pipe", id(text.substr(0, colon))}, {"end", e}};
      }
      case ArgType::kPipePoint: {
        const auto at = text.rfind('@');
        if (at == std::string::npos) bad("expected pipe@t, got '" + text + "'");
        return json{{"pipe", id(text.substr(0, at))}, {"t", number(text.substr(at + 1))}};
      }
      case ArgType::kPipePoints: {
        json out = json::array();
        for (const auto& part : split(text, ',')) out.push_back(parse(ArgType::kPipePoint, part));
        return out;
      }
      case ArgType::kTarget:
        if (text.find('@') != std::string::npos) return parse(ArgType::kPipePoint, text);
        return json{{"block", id(text)}};
      case ArgType::kOrigin: {
        if (const auto slash = text.rfind('/'); slash != std::string::npos) {
          return json{{"block", id(text.substr(0, slash))}, {"slot", integer(text.substr(slash + 1))}};
        }
        return parse(ArgType::kEnd, text);
      }
      case ArgType::kNumber: return number(text);
      case ArgType::kInt: return integer(text);
      case ArgType::kInts: {
        json out = json::array();
        for (const auto& part : split(text, ',')) out.push_back(integer(part));
        return out;
      }
      case ArgType::kString: return text;
      case ArgType::kBool:
        if (text == "true" || text == "on" || text == "yes") return true;
        if (text == "false" || text == "off" || text == "no") return false;
        bad("expected true or false, got '" + text + "'");
      case ArgType::kJson:
        try {
          return json::parse(text);
        } catch (const json::parse_error&) {
          bad("malformed JSON argument '" + text + "'");
        }
    }
    bad("unsupported argument");
  }

 private:
  [[noreturn]] void bad(const std::string& msg) const { fail(ErrorCode::kParseError, msg, line_); }

  double number(const std::string& text) const {
    if (text.empty()) bad("expected a number");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) bad("expected a number, got '" + text + "'");
    return v;
  }

  long long integer(const std::string& text) const {
    if (text.empty()) bad("expected an integer");
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size()) bad("expected an integer, got '" + text + "'");
    return v;
  }

  json numbers(const std::string& text, std::size_t n) const {
    const auto parts = split(text, ',');
    if (parts.size() != n) bad("expected " + std::to_string(n) + " comma-separated numbers, got '" + text + "'");
    json out = json::array();
    for (const auto& p : parts) out.push_back(number(p));
    return out;
  }

  const std::vector<ObjectId>& bound(const std::string& name) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) bad("unbound name '$" + name + "'");
    return it->second;
  }

  ObjectId id(const std::string& text) const {
    if (!text.empty() && text[0] == '$') {
      const auto open = text.find('[');
      if (open == std::string::npos) {
        const auto& ids = bound(text.substr(1));
        if (ids.size() != 1) bad("'" + text + "' names " + std::to_string(ids.size()) + " ids, pick one with [i]");
        return ids[0];
      }
      if (text.back() != ']') bad("malformed reference '" + text + "'");
      const auto& ids = bound(text.substr(1, open - 1));
      const long long k = integer(text.substr(open + 1, text.size() - open - 2));
      if (k < 0 || k >= static_cast<long long>(ids.size())) bad("index out of range in '" + text + "'");
      return ids[static_cast<std::size_t>(k)];
    }
    const long long v = integer(text);
    if (v < 0) bad("ids are non-negative, got '" + text + "'");
    return static_cast<ObjectId>(v);
  }

  const Bindings& bindings_;
  int line_;
};

struct Command {
  std::optional<std::string> binding;
  std::string verb;
  json args = json::object();
};

std::optional<Command> parse_line(const std::string& line, int lineno, const Bindings& bindings) {
  std::vector<Token> toks = tokenize(line, lineno);
  if (toks.empty()) return std::nullopt;
  Command cmd;
  std::size_t i = 0;
  if (toks.size() >= 2 && !toks[0].quoted && is_identifier(toks[0].text) && toks[1].text == "=" && !toks[1].quoted) {
    cmd.binding = toks[0].text;
    i = 2;
  }
  if (i >= toks.size()) fail(ErrorCode::kParseError, "missing verb", lineno);
  cmd.verb = toks[i++].text;
  if ((cmd.verb == "library" || cmd.verb == "catalog") && i < toks.size() && !toks[i].quoted &&
      (toks[i].text == "load" || toks[i].text == "use")) {
    cmd.verb += "_" + toks[i++].text;
  }
  const auto sig_it = signatures().find(cmd.verb);
  if (sig_it == signatures().end()) fail(ErrorCode::kParseError, "unknown verb '" + cmd.verb + "'", lineno);
  const Signature& sig = sig_it->second;
  const ArgParser parser(bindings, lineno);

  std::size_t next = 0;
  for (; i < toks.size(); ++i) {
    const Token& tok = toks[i];
    const auto eq = tok.text.find('=');
    if (eq != std::string::npos && eq > 0 && eq < tok.quote_start && is_identifier(tok.text.substr(0, eq))) {
      const std::string key = tok.text.substr(0, eq);
      auto kw = sig.keywords.find(key);
      ArgType type;
      if (kw != sig.keywords.end()) {
        type = kw->second;
      } else {
        auto pos = std::find_if(sig.positional.begin(), sig.positional.end(), [&](const Param& p) { return p.key == key; });
        if (pos == sig.positional.end() || pos->variadic) {
          fail(ErrorCode::kParseError, "unknown option '" + key + "' for " + cmd.verb, lineno);
        }
        type = pos->type;
      }
      if (cmd.args.contains(key)) fail(ErrorCode::kParseError, "'" + key + "' given twice", lineno);
      cmd.args[key] = parser.parse(type, tok.text.substr(eq + 1));
      continue;
    }
    while (next < sig.positional.size() && cmd.args.contains(sig.positional[next].key) && !sig.positional[next].variadic) {
      ++next;
    }
    if (next >= sig.positional.size()) {
      fail(ErrorCode::kParseError, "too many arguments for " + cmd.verb, lineno);
    }
    const Param& p = sig.positional[next];
    if (p.variadic) {
      if (!cmd.args.contains(p.key)) cmd.args[p.key] = json::array();
      cmd.args[p.key].push_back(parser.parse(p.type, tok.text));
    } else {
      cmd.args[p.key] = parser.parse(p.type, tok.text);
      ++next;
    }
  }
  for (const auto& p : sig.positional) {
    if (!p.optional && !cmd.args.contains(p.key)) {
      if (p.variadic) {
        fail(ErrorCode::kParseError, cmd.verb + " needs at least one '" + p.key + "'", lineno);
      }
      if (cmd.verb == "set_projection" || cmd.verb == "import_grid") continue;
      fail(ErrorCode::kParseError, cmd.verb + " is missing '" + p.key + "'", lineno);
    }
  }
  return cmd;
}

std::vector<ObjectId> result_ids(const json& result) {
  std::vector<ObjectId> out;
  if (result.contains("id") && result.at("id").is_number_integer()) out.push_back(result.at("id").get<ObjectId>());
  if (result.contains("ids") && result.at("ids").is_array()) {
    for (const auto& x : result.at("ids")) out.push_back(x.get<ObjectId>());
  }
  return out;
}

}  // namespace

std::vector<TranscriptEntry> run_script(Session& session, std::istream& in) {
  std::vector<TranscriptEntry> transcript;
  Bindings bindings;
  const bool saved_mode = session.commit_previews;
  session.commit_previews = true;
  std::string line;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto cmd = parse_line(line, lineno, bindings);
      if (!cmd) continue;
      json result;
      try {
        result = session.execute(cmd->verb, cmd->args);
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), lineno);
      }
      if (cmd->binding) bindings[*cmd->binding] = result_ids(result);
      transcript.push_back({lineno, cmd->verb, std::move(result)});
    }
  } catch (...) {
    session.commit_previews = saved_mode;
    throw;
  }
  session.commit_previews = saved_mode;
  return transcript;
}

std::vector<TranscriptEntry> run_script_file(Session& session, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open script '" + path + "'");
  return run_script(session, in);
}

std::string format_transcript(const std::vector<TranscriptEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    json shown = e.result;
    if (shown.contains("svg")) shown["svg"] = "<" + std::to_string(shown["svg"].get<std::string>().size()) + " bytes>";
    out += std::to_string(e.line) + " " + e.verb + " " + shown.dump() + "\n";
  }
  return out;
}

}  // namespace axon
