#pragma once

#include "stefan/error.hpp"
#include "stefan/signal.hpp"
#include "stefan/problem.hpp"
#include "stefan/quadrature.hpp"
#include "stefan/kernel.hpp"
#include "stefan/direct.hpp"
#include "stefan/inverse.hpp"
#include "stefan/experiment.hpp"
