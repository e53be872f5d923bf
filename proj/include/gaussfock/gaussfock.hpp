#pragma once

// Convenience umbrella: pulls in the whole library.

#include "errors.hpp"
#include "symplectic_core.hpp"
#include "mode_tails.hpp"
#include "gaussian_states.hpp"
#include "fock_oracle.hpp"
#include "json_io.hpp"
