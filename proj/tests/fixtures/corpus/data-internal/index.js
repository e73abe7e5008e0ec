module.exports = {
  palette: require('./palette'),
  version: '1.0.0'
};
