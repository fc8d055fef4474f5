#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "axon/core.hpp"
#include "axon/error.hpp"
#include "axon/persistence.hpp"
#include "axon/render.hpp"
#include "axon/service.hpp"
#include "axon/session.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) axon::fail(axon::ErrorCode::kIoError, "cannot write '" + path + "'");
  out << text;
}

void print_summary(const axon::Scheme& s, std::ostream& out) {
  out << "pipes " << s.pipes.size() << "\n"
      << "connections " << s.connections.size() << "\n"
      << "blocks " << s.blocks.size() << "\n"
      << "dimensions " << s.dimensions.size() << "\n"
      << "texts " << s.texts.size() << "\n"
      << "designators " << s.designators.size() << "\n"
      << "height marks " << s.height_marks.size() << "\n";
  const auto violations = axon::integrity_check(s);
  for (const auto& v : violations) {
    out << "violation " << axon::violation_name(v.kind) << " " << v.object << " " << v.detail << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axonometric piping scheme editor"};
  app.require_subcommand(1);

  std::string new_path;
  auto* cmd_new = app.add_subcommand("new", "Write an empty scheme document");
  cmd_new->add_option("file", new_path)->required();

  std::string open_path;
  auto* cmd_open = app.add_subcommand("open", "Load a scheme and report its contents");
  cmd_open->add_option("file", open_path)->required()->check(CLI::ExistingFile);

  std::string script_path, run_input, run_output, run_svg;
  auto* cmd_run = app.add_subcommand("run", "Run a command script");
  cmd_run->add_option("script", script_path)->required();
  cmd_run->add_option("--in", run_input, "Scheme to start from instead of an empty one");
  cmd_run->add_option("-o,--output", run_output, "Save the resulting scheme");
  cmd_run->add_option("--svg", run_svg, "Render the resulting scheme");

  std::string render_input, render_output, projection;
  bool glyph = false;
  bool render_script = false;
  auto* cmd_render = app.add_subcommand("render", "Render a scheme to SVG");
  cmd_render->add_option("file", render_input)->required();
  cmd_render->add_option("--projection", projection, "Projection preset name");
  cmd_render->add_flag("--glyph", glyph, "Draw the axes glyph");
  cmd_render->add_flag("--script", render_script, "Input is a command script");
  cmd_render->add_option("-o,--output", render_output)->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serve_input;
  auto* cmd_serve = app.add_subcommand("serve", "Serve the JSON API");
  cmd_serve->add_option("--port", port);
  cmd_serve->add_option("--host", host);
  cmd_serve->add_option("--open", serve_input, "Scheme to serve");

  CLI11_PARSE(app, argc, argv);

  try {
    axon::Session session;
    for (const auto& w : session.load_warnings()) std::cerr << "warning: " << w << "\n";

    if (*cmd_new) {
      axon::save(axon::Scheme{}, new_path);
    } else if (*cmd_open) {
      print_summary(axon::load(open_path), std::cout);
    } else if (*cmd_run) {
      if (!run_input.empty()) session.reset(axon::load(run_input));
      const auto transcript = axon::run_script_file(session, script_path);
      std::cout << axon::format_transcript(transcript);
      if (!run_output.empty()) axon::save(session.scheme(), run_output);
      if (!run_svg.empty()) {
        write_file(run_svg, session.execute("render", nlohmann::json::object()).at("svg").get<std::string>());
      }
    } else if (*cmd_render) {
      if (render_script) {
        axon::run_script_file(session, render_input);
      } else {
        session.reset(axon::load(render_input));
      }
      nlohmann::json args = {{"glyph", glyph}};
      if (!projection.empty()) args["projection"] = projection;
      write_file(render_output, session.execute("render", args).at("svg").get<std::string>());
    } else if (*cmd_serve) {
      if (!serve_input.empty()) session.reset(axon::load(serve_input));
      axon::Service service(session);
      std::cerr << "serving on http://" << host << ":" << port << "\n";
      service.listen(host, port);
    }
  } catch (const axon::Error& e) {
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
