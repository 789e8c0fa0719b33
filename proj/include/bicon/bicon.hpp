#pragma once

#include "bicon/adversary.hpp"
#include "bicon/cost.hpp"
#include "bicon/dynamics.hpp"
#include "bicon/errors.hpp"
#include "bicon/graph.hpp"
#include "bicon/pontryagin.hpp"
#include "bicon/trajectory.hpp"
