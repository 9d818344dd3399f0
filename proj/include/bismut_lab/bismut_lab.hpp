#pragma once

#include "bismut_lab/backgrounds.hpp"
#include "bismut_lab/courant.hpp"
#include "bismut_lab/errors.hpp"
#include "bismut_lab/flow.hpp"
#include "bismut_lab/hermitian_core.hpp"
#include "bismut_lab/identities.hpp"
#include "bismut_lab/io.hpp"
#include "bismut_lab/metric_jet.hpp"
#include "bismut_lab/oracle.hpp"
#include "bismut_lab/stability.hpp"
#include "bismut_lab/tensor.hpp"
