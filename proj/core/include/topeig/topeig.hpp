#pragma once

#include "topeig/asymptotics.hpp"
#include "topeig/eigensolve.hpp"
#include "topeig/errors.hpp"
#include "topeig/expression.hpp"
#include "topeig/grid.hpp"
#include "topeig/operators.hpp"
#include "topeig/profiles.hpp"
#include "topeig/version.hpp"
