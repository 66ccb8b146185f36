#pragma once

#include "rabisim/constants.hpp"
#include "rabisim/error.hpp"
#include "rabisim/operator_algebra.hpp"
#include "rabisim/models.hpp"
#include "rabisim/physical_mapping.hpp"
#include "rabisim/dynamics.hpp"
#include "rabisim/config.hpp"
#include "rabisim/presets.hpp"
#include "rabisim/runner.hpp"
