#pragma once

#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "laplacian.hpp"
#include "simplex.hpp"
#include "spectral.hpp"
#include "stepper.hpp"
#include "threads.hpp"
