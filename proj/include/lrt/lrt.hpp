#pragma once

// Umbrella header.
#include "lrt/equilibrium.hpp"
#include "lrt/errors.hpp"
#include "lrt/fields.hpp"
#include "lrt/forward.hpp"
#include "lrt/geometry.hpp"
#include "lrt/io.hpp"
#include "lrt/mesh.hpp"
#include "lrt/mesh_generators.hpp"
#include "lrt/mesh_io.hpp"
#include "lrt/parallel.hpp"
#include "lrt/raytrace.hpp"
#include "lrt/run_config.hpp"
#include "lrt/solver.hpp"
#include "lrt/stiffness.hpp"
#include "lrt/strain_field.hpp"
