#pragma once

#include "photon_detect/errors.hpp"
#include "photon_detect/fock.hpp"
#include "photon_detect/field_modes.hpp"
#include "photon_detect/atom_detector.hpp"
#include "photon_detect/measurement.hpp"
#include "photon_detect/experiments.hpp"
#include "photon_detect/config.hpp"
#include "photon_detect/table.hpp"
#include "photon_detect/cli.hpp"
