#pragma once

#include "ghzchain/config.hpp"
#include "ghzchain/core_model.hpp"
#include "ghzchain/csv.hpp"
#include "ghzchain/dynamics.hpp"
#include "ghzchain/experiments.hpp"
#include "ghzchain/integrator.hpp"
#include "ghzchain/oracle.hpp"
#include "ghzchain/parallel.hpp"
#include "ghzchain/spectral.hpp"
#include "ghzchain/sta.hpp"
