// Command execution for the CLI: builds meshes and problems from a
// RunConfig and writes the output files under `out`.

#pragma once

#include "hmmrd/config.hpp"
#include "hmmrd/mesh.hpp"

#include <iosfwd>

namespace hmmrd {

/// Mesh selected by `level` / `mesh_file`.
PolytopalMesh config_mesh(const RunConfig& cfg);

/// Runs the configured command. Progress goes to `log`, errors to `err`.
/// Returns 0 on success, 1 on a solver/diagnostic failure, 2 on invalid
/// input.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace hmmrd
