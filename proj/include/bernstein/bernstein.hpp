#pragma once

#include "baselines.hpp"
#include "basis.hpp"
#include "em.hpp"
#include "error.hpp"
#include "io.hpp"
#include "likelihood.hpp"
#include "model.hpp"
#include "select.hpp"
#include "sim.hpp"
#include "simplex.hpp"
