#include "ricci/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "ricci/errors.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

namespace ricci::io {

namespace {

std::string opt(const std::optional<double>& x, const char* missing) { return x ? number(*x) : missing; }

std::string backend_json(const Backend& b) {
  std::ostringstream os;
  if (const auto* t = dynamic_cast<const TorusBackend*>(&b)) {
    os << "{\"kind\":\"torus\",\"n1\":" << t->n1() << ",\"n2\":" << t->n2() << ",\"l1\":" << number(t->l1())
       << ",\"l2\":" << number(t->l2()) << "}";
  } else {
    os << "{\"kind\":\"sphere\",\"resolution\":" << b.size() << "}";
  }
  return os.str();
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  // nlohmann produces valid JSON string literals.
  return nlohmann::json(s).dump();
}

}  // namespace

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& t, const std::optional<std::string>& error) {
  for (const auto& s : t.steps) {
    out << "{\"record\":\"step\",\"label\":" << escape(t.label) << ",\"mu\":" << t.mu << ",\"k\":" << s.k
        << ",\"c0_increment\":" << number(s.c0_increment)
        << ",\"curvature_deviation\":" << number(s.curvature_deviation) << ",\"I\":" << number(s.functionals.I)
        << ",\"J\":" << number(s.functionals.J) << ",\"ding\":" << opt(s.functionals.ding, "null")
        << ",\"k_energy\":" << opt(s.functionals.k_energy, "null")
        << ",\"positivity_margin\":" << number(s.positivity_margin)
        << ",\"green_slack\":" << opt(s.green_slack, "null") << ",\"green_constant\":" << opt(s.green_constant, "null")
        << ",\"normalization_constant\":" << number(s.normalization_constant)
        << ",\"mobius_parameter\":" << number(s.mobius_parameter) << ",\"solve\":{\"iterations\":" << s.solve.iterations
        << ",\"final_residual_sup\":" << number(s.solve.final_residual_sup)
        << ",\"damping_events\":" << s.solve.damping_events << "}}\n";
  }
  if (error) {
    out << "{\"record\":\"error\",\"label\":" << escape(t.label) << ",\"completed_steps\":" << t.steps.size()
        << ",\"message\":" << escape(*error) << "}\n";
  }
}

void write_summary_csv(std::ostream& out, const Trajectory& t) {
  out << "k,c0_increment,curvature_deviation,I,J,ding,k_energy,positivity_margin,green_slack\n";
  for (const auto& s : t.steps) {
    out << s.k << ',' << number(s.c0_increment) << ',' << number(s.curvature_deviation) << ','
        << number(s.functionals.I) << ',' << number(s.functionals.J) << ',' << opt(s.functionals.ding, "") << ','
        << opt(s.functionals.k_energy, "") << ',' << number(s.positivity_margin) << ',' << opt(s.green_slack, "")
        << '\n';
  }
}

void write_convergence_svg(std::ostream& out, const Trajectory& t) {
  const double width = 640, height = 400, margin = 50;
  const double floor_value = 1e-17;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto take = [&](double v) {
    const double y = std::log10(std::max(v, floor_value));
    if (first) {
      lo = hi = y;
      first = false;
    }
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  };
  for (const auto& s : t.steps) {
    take(s.c0_increment);
    take(s.curvature_deviation);
  }
  if (hi - lo < 1.0) hi = lo + 1.0;
  const double kmax = std::max<double>(1.0, static_cast<double>(t.steps.size()));
  auto px = [&](int k) { return margin + (width - 2 * margin) * (k - 1) / std::max(1.0, kmax - 1.0); };
  auto py = [&](double v) {
    const double y = std::log10(std::max(v, floor_value));
    return height - margin - (height - 2 * margin) * (y - lo) / (hi - lo);
  };
  auto polyline = [&](const char* colour, auto value) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : t.steps) out << short_number(px(s.k)) << ',' << short_number(py(value(s))) << ' ';
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << t.label
      << " (mu = " << t.mu << ")</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"8\" y=\"" << margin << "\" font-family=\"sans-serif\" font-size=\"11\">1e" << short_number(hi)
      << "</text>\n";
  out << "<text x=\"8\" y=\"" << height - margin << "\" font-family=\"sans-serif\" font-size=\"11\">1e"
      << short_number(lo) << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 20
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">k = " << t.steps.size() << "</text>\n";
  if (!t.steps.empty()) {
    polyline("#1f77b4", [](const StepRecord& s) { return s.c0_increment; });
    polyline("#d62728", [](const StepRecord& s) { return s.curvature_deviation; });
  }
  out << "<text x=\"" << width - margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"11\" "
         "text-anchor=\"end\" fill=\"#1f77b4\">sup increment</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"38\" font-family=\"sans-serif\" font-size=\"11\" "
         "text-anchor=\"end\" fill=\"#d62728\">curvature deviation</text>\n";
  out << "</svg>\n";
}

void write_forward_jsonl(std::ostream& out, const ForwardTrajectory& t, std::optional<int> return_step) {
  for (const auto& s : t.steps) {
    out << "{\"record\":\"forward\",\"k\":" << s.k << ",\"c0_increment\":" << number(s.c0_increment)
        << ",\"ricci_minimum\":" << number(s.ricci_minimum) << ",\"positivity_margin\":" << number(s.positivity_margin)
        << ",\"curvature_deviation\":" << number(s.curvature_deviation) << "}\n";
  }
  out << "{\"record\":\"end\",\"steps\":" << t.steps.size()
      << ",\"lost_positivity\":" << (t.lost_positivity ? "true" : "false")
      << ",\"terminal_margin\":" << (t.lost_positivity ? number(t.terminal_margin) : "null")
      << ",\"return_to_initial\":" << (return_step ? std::to_string(*return_step) : "null") << "}\n";
}

void write_forward_csv(std::ostream& out, const ForwardTrajectory& t) {
  out << "k,c0_increment,ricci_minimum,positivity_margin,curvature_deviation\n";
  for (const auto& s : t.steps) {
    out << s.k << ',' << number(s.c0_increment) << ',' << number(s.ricci_minimum) << ','
        << number(s.positivity_margin) << ',' << number(s.curvature_deviation) << '\n';
  }
}

void write_field(std::ostream& out, const Field& f) {
  out << "{\"format\":\"ricci-field-v1\",\"backend\":" << backend_json(f.backend()) << ",\"values\":[";
  for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << number(f[i]);
  out << "]}\n";
}

Field read_field(const std::string& text, const Backend& backend) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("field file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != "ricci-field-v1") {
    throw Error("field file: unknown format");
  }
  if (!j.contains("backend") || j["backend"].dump() != nlohmann::json::parse(backend_json(backend)).dump()) {
    throw ShapeError("field file: stored backend does not match the configured backend");
  }
  if (!j.contains("values")) throw Error("field file: values missing");
  const auto& values = j["values"];
  if (!values.is_array() || values.size() != backend.size()) throw ShapeError("field file: wrong number of values");
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& x : values) {
    if (!x.is_number()) throw NonFiniteError("field file: non-numeric value");
    v.push_back(x.get<double>());
  }
  Field f = backend.from_values(std::move(v));
  f.require_finite("field file");
  return f;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace ricci::io
