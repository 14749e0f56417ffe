// qsl.hpp — umbrella header
#pragma once

#include "qsl/bath.hpp"
#include "qsl/bloch_redfield.hpp"
#include "qsl/config.hpp"
#include "qsl/driver.hpp"
#include "qsl/ensemble.hpp"
#include "qsl/errors.hpp"
#include "qsl/fmo.hpp"
#include "qsl/integrate.hpp"
#include "qsl/layout.hpp"
#include "qsl/matrix.hpp"
#include "qsl/propagate.hpp"
#include "qsl/rng.hpp"
#include "qsl/speed_limit.hpp"
#include "qsl/spin_boson.hpp"
#include "qsl/units.hpp"
