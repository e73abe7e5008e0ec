const fs = require('fs');
const local = require('./local');
const up = require("../up");
const lodash = require('lodash');
const dynamic = require(name);
