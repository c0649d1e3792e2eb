#pragma once

#include "logfol/bundles.hpp"
#include "logfol/cech.hpp"
#include "logfol/expr.hpp"
#include "logfol/foliation.hpp"
#include "logfol/jet.hpp"
#include "logfol/lie.hpp"
#include "logfol/logcalc.hpp"
#include "logfol/matrix.hpp"
#include "logfol/monoid.hpp"
#include "logfol/rational.hpp"
#include "logfol/semistability.hpp"
