#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "axon/core.hpp"
#include "axon/error.hpp"
#include "axon/persistence.hpp"
#include "axon/projection.hpp"
#include "axon/session.hpp"

namespace py = pybind11;
using nlohmann::json;
namespace ax = axon;

namespace {

json to_json(const py::handle& obj) {
  const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return json::parse(text);
}

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::object call(ax::Session& s, const std::string& verb, const json& args) { return to_python(s.execute(verb, args)); }

}  // namespace

PYBIND11_MODULE(axon, m) {
  m.doc() = "Axonometric piping scheme kernel";

  static py::exception<ax::Error> error_type(m, "AxonError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ax::Error& e) {
      py::object exc = py::handle(error_type.ptr())(std::string(e.code_name()) + ": " + e.what());
      exc.attr("code") = std::string(e.code_name());
      exc.attr("line") = e.line() ? py::cast(*e.line()) : py::none();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("project", [](std::array<double, 3> p, const std::string& projection) {
        const ax::Vec2 q = ax::project({p[0], p[1], p[2]}, ax::projection_by_name(projection));
        return std::array<double, 2>{q.x, q.y};
      },
      py::arg("point"), py::arg("projection") = "isometric");
  m.def("projections", [] {
    std::vector<std::string> names;
    for (const auto& p : ax::projection_presets()) names.push_back(p.name);
    return names;
  });

  py::class_<ax::Session>(m, "Session")
      .def(py::init<>())
      .def_static("load", [](const std::string& path) { return std::make_unique<ax::Session>(ax::load(path)); })
      .def("execute", [](ax::Session& s, const std::string& verb, py::object args) {
            return call(s, verb, args.is_none() ? json::object() : to_json(args));
          },
          py::arg("verb"), py::arg("args") = py::none())
      .def("confirm", [](ax::Session& s, const std::string& token) { return to_python(s.confirm(token)); })
      .def("cancel", &ax::Session::cancel)
      .def_readwrite("commit_previews", &ax::Session::commit_previews)
      .def_property_readonly("version", &ax::Session::version)
      .def_static("verbs", &ax::Session::verbs)
      .def("add_pipe", [](ax::Session& s, std::array<double, 3> a, std::array<double, 3> b) {
        return s.execute("add_pipe", {{"a", a}, {"b", b}}).at("id").get<ax::ObjectId>();
      })
      .def("connect_ends", [](ax::Session& s, ax::ObjectId p1, const std::string& e1, ax::ObjectId p2,
                              const std::string& e2) {
        return s.execute("connect_ends", {{"e1", {{"pipe", p1}, {"end", e1}}}, {"e2", {{"pipe", p2}, {"end", e2}}}})
            .at("id")
            .get<ax::ObjectId>();
      })
      .def("integrity", [](ax::Session& s) { return call(s, "integrity", json::object())["violations"]; })
      .def("run_script", [](ax::Session& s, const std::string& text) {
        std::istringstream in(text);
        py::list out;
        for (const auto& e : ax::run_script(s, in)) out.append(py::make_tuple(e.line, e.verb, to_python(e.result)));
        return out;
      })
      .def("render_svg", [](ax::Session& s, std::optional<std::string> projection, bool glyph) {
            json args = {{"glyph", glyph}};
            if (projection) args["projection"] = *projection;
            return s.execute("render", args).at("svg").get<std::string>();
          },
          py::arg("projection") = py::none(), py::arg("glyph") = false)
      .def("document", [](ax::Session& s) { return to_python(ax::scheme_to_json(s.scheme())); })
      .def("save", [](ax::Session& s, const std::string& path) { ax::save(s.scheme(), path); })
      .def("__len__", [](ax::Session& s) { return s.scheme().pipes.size(); });
}
