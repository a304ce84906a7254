#pragma once

#include "fpma/array.hpp"
#include "fpma/device.hpp"
#include "fpma/errors.hpp"
#include "fpma/mcam.hpp"
#include "fpma/metrics.hpp"
#include "fpma/serialize.hpp"
#include "fpma/solver.hpp"
