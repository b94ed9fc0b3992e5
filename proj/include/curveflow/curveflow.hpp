#pragma once

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/flow_models.hpp"
#include "curveflow/redistribution.hpp"
#include "curveflow/cyclic_tridiagonal.hpp"
#include "curveflow/time_stepper.hpp"
#include "curveflow/config.hpp"
#include "curveflow/output.hpp"
