#pragma once

#include "dtil/concentration.hpp"
#include "dtil/config.hpp"
#include "dtil/differential.hpp"
#include "dtil/energy.hpp"
#include "dtil/fields.hpp"
#include "dtil/lattice.hpp"
#include "dtil/matrix.hpp"
#include "dtil/parallel.hpp"
#include "dtil/regularity.hpp"
#include "dtil/snapshot.hpp"
#include "dtil/solver.hpp"
#include "dtil/synth.hpp"
