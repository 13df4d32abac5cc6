#pragma once

#include "sl3sph/group.hpp"
#include "sl3sph/lie.hpp"
#include "sl3sph/mat3.hpp"
#include "sl3sph/phase.hpp"
#include "sl3sph/quadrature.hpp"
#include "sl3sph/report.hpp"
#include "sl3sph/sampling.hpp"
#include "sl3sph/spherical.hpp"
#include "sl3sph/vdc.hpp"
#include "sl3sph/verification.hpp"
