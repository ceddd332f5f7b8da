#pragma once

#include <ostream>
#include <span>
#include <string>

#include "glauber/configuration.hpp"
#include "glauber/path_process.hpp"

namespace glauber {

/// Round-trippable rendering with 17 significant digits.
std::string format_double(double x);

/// `replica,particle_id,x_0,...,x_{d-1}`, one row per point.
void write_samples_csv(std::ostream& out, std::span<const Configuration> samples,
                       std::size_t dim);

/// `time,kind,particle_id,x_0,...,x_{d-1}`, one row per event; kind is BIRTH or DEATH.
void write_event_log_csv(std::ostream& out, const EventLog& log, std::size_t dim);

}  // namespace glauber
