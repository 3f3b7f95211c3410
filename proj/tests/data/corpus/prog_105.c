#include <stdio.h>
double apply(double prev[], int c)
{
    double pos = 0.0;
    int b;
    for (b = 0; b < c; b++)
        pos += prev[b];
    return pos / c;
}
int main(void)
{
    double prev[7] = {96.2, 82.4, 62.0, 70.2, 21.7, 53.5, 36.4};
    double acc;
    acc = apply(prev, 7);
    printf("%.2f\n", acc);
    return 0;
}
