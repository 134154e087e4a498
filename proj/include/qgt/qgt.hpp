#pragma once

#include "qgt/dp_oracle.hpp"
#include "qgt/executor.hpp"
#include "qgt/plan.hpp"
#include "qgt/report.hpp"
#include "qgt/simulate.hpp"
#include "qgt/traffic.hpp"
#include "qgt/version.hpp"
