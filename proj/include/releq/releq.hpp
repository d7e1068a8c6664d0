#pragma once

#include "releq/errors.hpp"
#include "releq/nbody.hpp"
#include "releq/smale.hpp"
#include "releq/equilibria.hpp"
#include "releq/quadrature.hpp"
#include "releq/cell.hpp"
#include "releq/ansatz.hpp"
#include "releq/kinetic.hpp"
#include "releq/dynamics.hpp"
#include "releq/io.hpp"
#include "releq/pipeline.hpp"
