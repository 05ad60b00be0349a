#pragma once

#include "jtent/errors.hpp"
#include "jtent/model.hpp"
#include "jtent/tridiagonal.hpp"
#include "jtent/radial.hpp"
#include "jtent/observables.hpp"
#include "jtent/tangles.hpp"
#include "jtent/asymptotics.hpp"
#include "jtent/pipeline.hpp"
