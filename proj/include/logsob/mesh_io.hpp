#pragma once

#include <string>

#include "logsob/mesh.hpp"

namespace logsob {

/// Reads OFF/OBJ (surfaces in R^3) or the JSON mesh schema
/// {"ambient_dim": N, "vertices": [[..]], "cells": [[..]]} which also covers
/// curves and codimension >= 2 embeddings. Format picked by extension.
EmbeddedMesh read_mesh(const std::string& path);

EmbeddedMesh read_mesh_json(const std::string& text);

void write_mesh(const EmbeddedMesh& mesh, const std::string& path);

std::string mesh_to_json(const EmbeddedMesh& mesh);

} // namespace logsob
