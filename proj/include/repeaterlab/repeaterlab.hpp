#pragma once

#include "repeaterlab/bounds.hpp"
#include "repeaterlab/concentration.hpp"
#include "repeaterlab/criterion.hpp"
#include "repeaterlab/error.hpp"
#include "repeaterlab/qmath.hpp"
#include "repeaterlab/random.hpp"
#include "repeaterlab/repeater.hpp"
#include "repeaterlab/report.hpp"
#include "repeaterlab/states.hpp"
