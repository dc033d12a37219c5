#include "knds/errors.hpp"
