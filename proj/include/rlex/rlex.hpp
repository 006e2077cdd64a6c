#pragma once

// Umbrella header for the rlex library.

#include "rlex/agents.hpp"
#include "rlex/bandit.hpp"
#include "rlex/core_mdp.hpp"
#include "rlex/csv.hpp"
#include "rlex/embedding.hpp"
#include "rlex/entropy.hpp"
#include "rlex/envs.hpp"
#include "rlex/harness.hpp"
#include "rlex/intrinsic.hpp"
#include "rlex/knn.hpp"
#include "rlex/linalg.hpp"
#include "rlex/mepc.hpp"
#include "rlex/plot.hpp"
#include "rlex/rng.hpp"
#include "rlex/special.hpp"
