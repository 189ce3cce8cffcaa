#pragma once

#include "fcvbw/complexity.hpp"
#include "fcvbw/design.hpp"
#include "fcvbw/engine.hpp"
#include "fcvbw/errors.hpp"
#include "fcvbw/fft.hpp"
#include "fcvbw/io.hpp"
#include "fcvbw/lp.hpp"
#include "fcvbw/ops.hpp"
#include "fcvbw/oracle.hpp"
#include "fcvbw/ptvir.hpp"
#include "fcvbw/spectrum.hpp"
