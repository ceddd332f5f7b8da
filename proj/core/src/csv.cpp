#include "glauber/csv.hpp"

#include <cstdio>

namespace glauber {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void header_coords(std::ostream& out, std::size_t dim) {
  for (std::size_t a = 0; a < dim; ++a) out << ",x_" << a;
  out << '\n';
}

void coords(std::ostream& out, const Point& p, std::size_t dim) {
  for (std::size_t a = 0; a < dim; ++a) out << ',' << format_double(p[a]);
  out << '\n';
}

}  // namespace

void write_samples_csv(std::ostream& out, std::span<const Configuration> samples,
                       std::size_t dim) {
  out << "replica,particle_id";
  header_coords(out, dim);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    for (const auto& p : samples[r]) {
      out << r << ',' << p.id;
      coords(out, p.location, dim);
    }
  }
}

void write_event_log_csv(std::ostream& out, const EventLog& log, std::size_t dim) {
  out << "time,kind,particle_id";
  header_coords(out, dim);
  for (const auto& e : log.events()) {
    out << format_double(e.time) << ',' << (e.kind == EventKind::birth ? "BIRTH" : "DEATH") << ','
        << e.id;
    coords(out, e.location, dim);
  }
}

}  // namespace glauber
