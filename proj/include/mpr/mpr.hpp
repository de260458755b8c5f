#pragma once

#include "mpr/bounds.hpp"
#include "mpr/channel.hpp"
#include "mpr/construct.hpp"
#include "mpr/core.hpp"
#include "mpr/matrix_io.hpp"
#include "mpr/plan.hpp"
#include "mpr/verify.hpp"
