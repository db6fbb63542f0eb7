#pragma once

#include "macopp/conformal.hpp"
#include "macopp/density_ratio.hpp"
#include "macopp/harness.hpp"
#include "macopp/io.hpp"
#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/predictor.hpp"
#include "macopp/rng.hpp"
#include "macopp/synthetic.hpp"
#include "macopp/trajectory.hpp"
