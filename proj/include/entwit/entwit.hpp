#pragma once

// Umbrella header: two-mode Fock-space states, su(2)/su(1,1) operator
// algebra, uncertainty-relation entanglement witnesses, phase/beamsplitter
// transforms, and the four-phase photon-counting measurement simulation.

#include "entwit/algebra.hpp"
#include "entwit/criteria.hpp"
#include "entwit/errors.hpp"
#include "entwit/fock.hpp"
#include "entwit/measurement.hpp"
#include "entwit/rng.hpp"
#include "entwit/states.hpp"
#include "entwit/transforms.hpp"
#include "entwit/version.hpp"
