#include <stdio.h>
double combine(double size[], int y)
{
    double cur = 0.0;
    int k;
    for (k = 0; k < y; k++)
        cur += size[k];
    return cur / y;
}
int main(void)
{
    double size[6] = {43.6, 25.5, 40.1, 92.5, 2.5, 70.7};
    double acc;
    acc = combine(size, 6);
    printf("%.2f\n", acc);
    return 0;
}
