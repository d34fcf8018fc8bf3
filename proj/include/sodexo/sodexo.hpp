#pragma once

// Umbrella header for the whole library.

#include "sodexo/abm.hpp"
#include "sodexo/config.hpp"
#include "sodexo/dynamics.hpp"
#include "sodexo/error.hpp"
#include "sodexo/graph.hpp"
#include "sodexo/model.hpp"
#include "sodexo/numeric.hpp"
#include "sodexo/pas.hpp"
#include "sodexo/scenario.hpp"
#include "sodexo/stackelberg.hpp"
