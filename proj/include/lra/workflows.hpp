#pragma once

#include <string>
#include <vector>

#include "lra/config.hpp"

namespace lra {

enum class Command { KernelCheck, Predict, Simulate, Validate, Sweep };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

struct Outcome {
  bool pass = true;  // all thresholds of the command met
  std::vector<std::string> artifacts;
  std::string summary;
};

// Writes the command's artifacts and effective_config.json into c.output_dir.
Outcome run_command(Command cmd, const ExperimentConfig& c);

// Shortest round-trip decimal, locale independent.
std::string format_number(double v);
// RFC 4180 file: CRLF line ends, fields quoted when needed.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
// Binary PGM rendered from a numeric CSV grid (no header).
void render_pgm_from_csv(const std::string& csv_path, const std::string& pgm_path);

}  // namespace lra
