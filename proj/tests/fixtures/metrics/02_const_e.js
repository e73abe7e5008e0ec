module.exports = 2.718281828459045235360287471352662497757247093699959574966;
