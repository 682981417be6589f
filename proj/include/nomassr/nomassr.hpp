#pragma once

#include "nomassr/allocator.hpp"
#include "nomassr/channel.hpp"
#include "nomassr/montecarlo.hpp"
#include "nomassr/oma.hpp"
#include "nomassr/oracle.hpp"
#include "nomassr/rates.hpp"
#include "nomassr/types.hpp"
#include "nomassr/units.hpp"
