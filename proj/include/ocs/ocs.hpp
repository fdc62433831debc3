#pragma once

// Umbrella header for the contribution selection toolkit.

#include "ocs/conic.hpp"
#include "ocs/errors.hpp"
#include "ocs/frontier.hpp"
#include "ocs/io.hpp"
#include "ocs/linalg.hpp"
#include "ocs/model.hpp"
#include "ocs/qp.hpp"
#include "ocs/sqp.hpp"
#include "ocs/synthetic.hpp"
