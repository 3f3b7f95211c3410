#include <stdio.h>
typedef struct {
    double key;
    double x;
} Node;
double apply(Node res)
{
    double z = res.key * res.x;
    return z;
}
void compute(Node *res, double k)
{
    res->key = res->key * k;
    res->x = res->x * k;
}
int main(void)
{
    Node res;
    double k = 6.5;
    res.key = 12.0;
    res.x = 11.0;
    compute(&res, k);
    printf("%f\n", apply(res));
    return 0;
}
